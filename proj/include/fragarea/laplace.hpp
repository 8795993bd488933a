#ifndef FRAGAREA_LAPLACE_HPP_
#define FRAGAREA_LAPLACE_HPP_

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fragarea/interp.hpp"
#include "fragarea/measures.hpp"
#include "fragarea/moments.hpp"

namespace fragarea {

/// Laplace transform ell(q) = E exp(-q A) tabulated on a grid: node 0 plus
/// geometric spacing up to q_max. Off-grid evaluation interpolates log ell
/// with a monotone cubic (linear log-extrapolation beyond the last node).
class LaplaceGrid {
public:
    std::vector<double> q;
    std::vector<double> ell;
    std::vector<double> node_residual;  // fixed-point defect per node
    double residual = 0.0;              // sup over nodes
    int iterations = 0;
    std::vector<double> iteration_deltas;  // sup-norm change per iteration
    std::string interpolation = "monotone-cubic-log";

    double operator()(double query) const;

    void rebuild_interpolant();

private:
    PchipInterpolant log_interp_;
};

/// Laplace transform of the area when nu = delta_{1/2} with unit rate:
/// ell(q) = prod_{n>=0} (1 + 2^{n(alpha-1)} q)^{-2^n}, evaluated in log
/// space with the geometric tail (ratio 2^alpha) truncated below tol.
double dyadic_laplace(double alpha, double q, double tol = 1e-14);

/// | -q ell(q) - ell(q) + ell(2^{alpha-1} q)^2 | for the dyadic measure;
/// analytically zero, so the value is pure numerical noise.
double dyadic_residual(double alpha, double q);

/// Fixed-point iteration for finite dislocation measures:
///   ell_{m+1}(q) = (nu(m)+q)^{-1} int nu(dx) ell_m(x^{1-a} q) ell_m((1-x)^{1-a} q)
/// from ell_0(q) = exp(-q M_1). Stops when the sup-norm change drops below
/// tol; throws NoConvergence when max_iter is exhausted first.
LaplaceGrid solve_laplace_fixed_point(const FragmentationParams& params, double q_max,
                                      int grid_size, int max_iter, double tol);

struct ResidualReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_residual = 0.0;
    double rel_residual = 0.0;
};

/// Checks the moment identity <eta,f'> = int nu(dx)(<eta,f> - <eta_x,f>)
/// for f(a) = a^k against a moment table. For continuous measures the
/// right side integrates the binomial expansion directly against the
/// density, independently of the closed-form coefficient route.
ResidualReport verify_monomial(const FragmentationParams& params, const MomentTable& table,
                               int k);

/// Same identity for f(a) = exp(-q a) with the transform supplied as a
/// callable (closed-form dyadic product, solved grid, or an empirical
/// transform built from Monte Carlo samples). Finite measures only.
ResidualReport verify_exponential(const FragmentationParams& params,
                                  const std::function<double(double)>& laplace, double q);

/// Empirical Laplace transform of a sample set.
std::function<double(double)> empirical_laplace(std::vector<double> samples);

/// CSV: q,ell,residual.
void write_laplace_csv(std::ostream& os, const LaplaceGrid& grid);

}  // namespace fragarea

#endif  // FRAGAREA_LAPLACE_HPP_

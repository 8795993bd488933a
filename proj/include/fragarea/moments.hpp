#ifndef FRAGAREA_MOMENTS_HPP_
#define FRAGAREA_MOMENTS_HPP_

#include <boost/multiprecision/cpp_int.hpp>
#include <iosfwd>
#include <vector>

#include "fragarea/measures.hpp"
#include "fragarea/quadrature.hpp"

namespace fragarea {

enum class CoeffMethod { closed_form, quadrature };

/// Coefficients and moments of the area recursion
///   a_k M_k = k M_{k-1} + sum_{j=1}^{k-1} a_{j,k} M_j M_{k-j},  M_0 = 1.
struct MomentTable {
    int K = 0;
    double alpha = 0.0;
    std::vector<double> a;      // a[k-1] = a_k, k = 1..K
    std::vector<double> M;      // M[k]   = M_k, k = 0..K
    std::vector<double> bound;  // bound[k-1] = moment_upper_bound(k)
    std::vector<std::vector<double>> a_jk;  // a_jk[k-2][j-1], k = 2..K, j = 1..k-1
    std::vector<CoeffMethod> method_a;
    std::vector<std::vector<CoeffMethod>> method_a_jk;

    double ajk(int j, int k) const { return a_jk.at(k - 2).at(j - 1); }
};

/// Normalized excursion-area constants K_k, kept as exact rationals:
///   K_k = (3k/4 - 1) K_{k-1} + sum_{j=1}^{k-1} K_j K_{k-j},  K_0 = -1/2,
/// with derived real moments M_k = 4 sqrt(pi) 2^{-k/2} k! / Gamma((3k-1)/2) K_k.
struct TakacsTable {
    int K = 0;
    std::vector<boost::multiprecision::cpp_rational> k_seq;  // K_0..K_K
    std::vector<double> moments;                             // M_0..M_K
};

/// a_k = Phi(k(1-alpha) - 1). Closed forms for Brownian/Beta/Atomic,
/// quadrature for Density variants.
double coeff_a(const FragmentationParams& params, int k);

/// a_{j,k} = C(k,j) int x^{j(1-alpha)} (1-x)^{(k-j)(1-alpha)} nu(dx),
/// 1 <= j < k. For the symmetric families (Brownian, Beta) the value is the
/// symmetrized full-interval form matching the Gamma/Beta closed forms.
double coeff_a_jk(const FragmentationParams& params, int j, int k);

/// Forced quadrature evaluations, the independent side of the
/// closed-form/quadrature coefficient pair. Continuous variants only.
QuadratureResult coeff_a_quadrature(const FragmentationParams& params, int k,
                                    double tol = 1e-12);
QuadratureResult coeff_a_jk_quadrature(const FragmentationParams& params, int j, int k,
                                       double tol = 1e-12);

MomentTable moment_table(const FragmentationParams& params, int K);

TakacsTable takacs_table(int K);

/// k! / (Phi(-alpha) ... Phi(-k alpha)): k-th moment of the tagged-fragment
/// lifetime.
double tagged_fragment_moment(const FragmentationParams& params, int k);

/// k * tagged_fragment_moment(k); M_k never exceeds this, with equality at
/// k = 1.
double moment_upper_bound(const FragmentationParams& params, int k);

/// E_x(A) = (sum_i x_i^{1-alpha}) * M_1 for a starting mass partition x.
double mean_area_for_partition(const FragmentationParams& params, const MassPartition& x);

/// CSV: k,a_k,M_k,bound_k,bound_ok (k = 0 row has empty coefficient cells).
void write_moments_csv(std::ostream& os, const MomentTable& table);

/// Long-form CSV of the triangular array: j,k,a_jk.
void write_coeffs_csv(std::ostream& os, const MomentTable& table);

}  // namespace fragarea

#endif  // FRAGAREA_MOMENTS_HPP_

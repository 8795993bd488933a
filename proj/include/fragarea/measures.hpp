#ifndef FRAGAREA_MEASURES_HPP_
#define FRAGAREA_MEASURES_HPP_

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "fragarea/interp.hpp"
#include "fragarea/quadrature.hpp"
#include "fragarea/rng.hpp"

namespace fragarea {

// A binary dislocation measure nu lives on [1/2, 1): a split of a mass-m
// fragment produces (m*x, m*(1-x)) with x drawn from nu. The variants below
// are the supported parameterizations.

/// Splitting law of the Brownian interval fragmentation:
/// density 2 / sqrt(2 pi x^3 (1-x)^3) on [1/2, 1).
struct BrownianMeasure {};

/// Beta-splitting family: density c x^beta (1-x)^beta on (1/2, 1),
/// with -2 < beta < -1 and c > 0.
struct BetaMeasure {
    double c;
    double beta;
};

struct Atom {
    double x;  // in [1/2, 1)
    double w;  // positive rate
};

/// Finitely many split atoms.
struct AtomicMeasure {
    std::vector<Atom> atoms;
};

/// Pointwise-evaluable density on (1/2, x_max). The declared endpoint
/// exponents drive the quadrature substitutions: d(x) ~ C (1-x)^{s_one}
/// as x -> 1- (only meaningful when x_max == 1) and d(x) stays bounded
/// near 1/2 up to a factor (x - 1/2)^{s_half}.
struct DensityMeasure {
    std::function<double(double)> density;
    double s_half = 0.0;
    double s_one = 0.0;
    double x_max = 1.0;
};

using DislocationMeasure =
    std::variant<BrownianMeasure, BetaMeasure, AtomicMeasure, DensityMeasure>;

/// Measure plus the self-similarity index alpha < 0.
struct FragmentationParams {
    DislocationMeasure measure;
    double alpha;
};

/// Finite non-increasing sequence of fragment masses in (0,1] with total
/// mass at most 1 (tolerance 1e-12 for floating-point unit splits).
class MassPartition {
public:
    explicit MassPartition(std::vector<double> masses);
    const std::vector<double>& masses() const { return masses_; }

private:
    std::vector<double> masses_;
};

/// Structural invariants plus the integrability condition
/// int (1-x) nu(dx) < infinity. Throws InvalidParameter, DivergentIntegral
/// or EmptyMeasure with a diagnostic naming the violated invariant.
void validate(const DislocationMeasure& nu);
void validate(const FragmentationParams& params);

/// Non-throwing variant: empty string on success, "Code: detail" otherwise.
std::string validate_diagnostic(const DislocationMeasure& nu);

/// int (1-x) nu(dx); finite for every valid measure.
double e9_mass(const DislocationMeasure& nu);

/// Phi(q) = int (1 - x^{1+q} - (1-x)^{1+q}) nu(dx) for q >= 0. Concave,
/// increasing, Phi(0) = 0. Closed forms for Brownian/Beta/Atomic,
/// quadrature for Density variants.
double phi(const DislocationMeasure& nu, double q);
inline double phi(const FragmentationParams& p, double q) { return phi(p.measure, q); }

/// Forced quadrature evaluation of Phi for continuous variants; the
/// independent cross-check of the closed forms.
QuadratureResult phi_quadrature(const DislocationMeasure& nu, double q, double tol = 1e-12);

/// nu restricted to {x : 1 - x > 1/n}. Atoms are dropped; continuous
/// variants come back as a Density supported on (1/2, 1 - 1/n).
/// Throws EmptyMeasure when nothing survives.
DislocationMeasure truncate(const DislocationMeasure& nu, int n);

/// nu([1/2,1)); std::nullopt when infinite.
std::optional<double> total_mass(const DislocationMeasure& nu);

/// Density of a continuous variant at x (one_minus_x passed exactly).
/// Throws DomainError for Atomic.
double density_at(const DislocationMeasure& nu, double x, double one_minus_x);

/// Upper end of the support (1 except for truncated Density variants).
double support_upper(const DislocationMeasure& nu);

/// Effective exponent of the density near the upper support end, used to
/// pick quadrature substitutions (0 when the support stops short of 1).
double density_s_right(const DislocationMeasure& nu);

/// 1 - x^{1+q} - (1-x)^{1+q} as a function of 1-x, evaluated without
/// cancellation near x -> 1. The integrand of Phi and the a_k coefficients.
double split_bracket(double q, double one_minus_x);

/// int g(x, 1-x) nu(dx): exact sum for Atomic, quadrature against the
/// density otherwise. g_upper_exponent is the order at which g vanishes
/// (or diverges) as x approaches the upper support end; it is combined
/// with the density exponent to pick the substitution.
QuadratureResult integrate_measure(const DislocationMeasure& nu,
                                   const std::function<double(double, double)>& g,
                                   double g_upper_exponent, double tol = 1e-10);

/// Draws splits x ~ nu/nu(m). Built once per measure; sampling is const
/// and thread-safe with per-thread streams. Atomic variants use discrete
/// inverse CDF, continuous ones a precomputed monotone grid inverse with
/// CDF tolerance 1e-8.
class SplitSampler {
public:
    explicit SplitSampler(const DislocationMeasure& nu);  // throws NotFinite

    double sample(RandomStream& rng) const;
    double rate() const { return rate_; }

private:
    double rate_ = 0.0;
    // discrete part
    std::vector<double> atom_x_;
    std::vector<double> atom_cdf_;  // normalized, last entry 1
    // continuous part
    PchipInterpolant inverse_cdf_;  // x as a function of normalized CDF
};

}  // namespace fragarea

#endif  // FRAGAREA_MEASURES_HPP_

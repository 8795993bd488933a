#ifndef FRAGAREA_QUADRATURE_HPP_
#define FRAGAREA_QUADRATURE_HPP_

#include <functional>

namespace fragarea {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

/// Integrand evaluated as f(x, x - a, b - x). Both endpoint distances are
/// computed inside the engine without cancellation, so integrands with
/// algebraic endpoint factors stay accurate arbitrarily close to a and b.
using EndpointIntegrand = std::function<double(double, double, double)>;

/// Integrate f over (a, b) where f(x) ~ C (b-x)^{s_right} as x -> b-
/// (s_right > -1). A power substitution removes the right-endpoint
/// singularity, then tanh-sinh refinement runs until the level-to-level
/// difference drops below tol or max_depth is reached. Left-endpoint
/// algebraic singularities (exponent > -1) are absorbed by the tanh-sinh
/// tail without declaration.
///
/// Throws DomainError (s_right <= -1, bad interval) and QuadratureFailure
/// (estimate still above tol at max_depth).
QuadratureResult integrate_interval(const EndpointIntegrand& f, double a, double b,
                                    double s_right, double tol = 1e-10,
                                    int max_depth = 20);

/// Integrate f over (1/2, 1) with f(x) ~ C (1-x)^{s_one} near 1.
/// The integrand receives (x, 1-x).
QuadratureResult integrate_half_one(const std::function<double(double, double)>& f,
                                    double s_one, double tol = 1e-10,
                                    int max_depth = 20);

}  // namespace fragarea

#endif  // FRAGAREA_QUADRATURE_HPP_

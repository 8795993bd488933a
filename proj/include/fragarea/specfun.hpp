#ifndef FRAGAREA_SPECFUN_HPP_
#define FRAGAREA_SPECFUN_HPP_

namespace fragarea {

/// ln Gamma(x) for x > 0, absolute error below 1e-13. Implemented in-repo
/// (Stirling series with argument shift) so results are identical across
/// platforms and libm versions. Throws DomainError for x <= 0.
double log_gamma(double x);

/// ln B(a,b) for a,b > 0.
double log_beta(double a, double b);

/// B(a,b) = Gamma(a)Gamma(b)/Gamma(a+b) for a,b > 0, relative error <= 1e-12.
double beta_fn(double a, double b);

}  // namespace fragarea

#endif  // FRAGAREA_SPECFUN_HPP_

#include "fragarea/specfun.hpp"

#include <cmath>

#include "fragarea/errors.hpp"

namespace fragarea {
namespace {

// B_{2k} / (2k (2k-1)) for the Stirling tail, k = 1..8. With the argument
// shifted to x >= 10 the truncated term is below 2e-18.
constexpr double kStirling[] = {
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
};

constexpr double kHalfLogTwoPi = 0.91893853320467274178;  // ln(2*pi)/2

double stirling_log_gamma(double x) {
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double tail = 0.0;
    double p = inv;
    for (double c : kStirling) {
        tail += c * p;
        p *= inv2;
    }
    return (x - 0.5) * std::log(x) - x + kHalfLogTwoPi + tail;
}

}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
    if (x >= 10.0) return stirling_log_gamma(x);
    // Gamma(x) = Gamma(x+n) / (x (x+1) ... (x+n-1))
    double shift = 0.0;
    double y = x;
    while (y < 10.0) {
        shift += std::log(y);
        y += 1.0;
    }
    return stirling_log_gamma(y) - shift;
}

double log_beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("log_beta: arguments must be positive");
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double beta_fn(double a, double b) { return std::exp(log_beta(a, b)); }

}  // namespace fragarea

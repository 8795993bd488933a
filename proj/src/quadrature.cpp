#include "fragarea/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fragarea/errors.hpp"

namespace fragarea {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kWMax = 6.5;        // tanh-sinh abscissa cap
constexpr double kTermEps = 1e-18;   // relative tail cutoff per level

// One tanh-sinh node at abscissa w > 0. `d` is the distance of the
// transformed point to the nearer end of (0,1); the node pair is (d, 1-d).
struct Node {
    double d;
    double weight;  // dt/dw
};

Node make_node(double w) {
    const double r = 0.5 * kPi * std::sinh(w);
    const double e = std::exp(-2.0 * std::abs(r));
    const double d = e / (1.0 + e);
    const double weight = kPi * std::cosh(w) * e / ((1.0 + e) * (1.0 + e));
    return {d, weight};
}

}  // namespace

QuadratureResult integrate_interval(const EndpointIntegrand& f, double a, double b,
                                    double s_right, double tol, int max_depth) {
    if (!(b > a)) throw DomainError("integrate_interval: requires a < b");
    if (!(s_right > -1.0)) throw DomainError("integrate_interval: right exponent must exceed -1");
    if (max_depth < 1) throw DomainError("integrate_interval: max_depth must be >= 1");

    const double width = b - a;
    // x = b - width * t^p regularizes (b-x)^{s_right}: the transformed
    // integrand vanishes linearly at t = 0.
    const double p = std::clamp(2.0 / (1.0 + s_right), 1.0, 60.0);

    long evals = 0;
    // g(t) for t given as the distance to the nearer of {0, 1}.
    const auto g = [&](double dist, bool near_zero) -> double {
        ++evals;
        double tp, one_minus_tp, t;
        if (near_zero) {
            t = dist;
            tp = std::pow(t, p);
            one_minus_tp = 1.0 - tp;  // tp <= t <= 1/2, no cancellation
        } else {
            t = 1.0 - dist;
            const double lt = std::log1p(-dist);
            tp = std::exp(p * lt);
            one_minus_tp = -std::expm1(p * lt);
        }
        const double db = width * tp;             // b - x
        const double da = width * one_minus_tp;   // x - a
        const double x = near_zero ? b - db : a + da;
        const double v = f(x, da, db);
        if (!std::isfinite(v)) return 0.0;  // guarded endpoint overshoot
        return v * width * p * (tp / t);
    };

    // Level 0: trapezoid with h = 1, extending outward until terms vanish.
    double h = 1.0;
    double sum = make_node(0.0).weight * g(0.5, true);
    for (int sign = -1; sign <= 1; sign += 2) {
        double prev_small = 0;
        for (double w = 1.0; w <= kWMax; w += 1.0) {
            const Node nd = make_node(w);
            if (nd.weight == 0.0 || nd.d == 0.0) break;
            const double term = nd.weight * g(nd.d, sign < 0);
            sum += term;
            const double small = std::abs(term);
            if (small <= kTermEps * (1.0 + std::abs(sum)) && prev_small <= kTermEps * (1.0 + std::abs(sum)))
                break;
            prev_small = small;
        }
    }
    double integral = h * sum;
    double estimate = std::abs(integral);

    for (int depth = 1; depth <= max_depth; ++depth) {
        h *= 0.5;
        double add = 0.0;
        for (int sign = -1; sign <= 1; sign += 2) {
            double prev_small = 0;
            for (double w = h; w <= kWMax; w += 2.0 * h) {
                const Node nd = make_node(w);
                if (nd.weight == 0.0 || nd.d == 0.0) break;
                const double term = nd.weight * g(nd.d, sign < 0);
                add += term;
                const double small = std::abs(term);
                const double scale = kTermEps * (1.0 + std::abs(sum + add));
                if (small <= scale && prev_small <= scale && w > 1.0) break;
                prev_small = small;
            }
        }
        sum += add;
        const double next = h * sum;
        estimate = std::abs(next - integral);
        integral = next;
        if (!std::isfinite(integral))
            throw QuadratureFailure("integrate_interval: integrand produced a non-finite sum");
        if (depth >= 2 && estimate <= std::max(tol, 8e-16 * std::abs(integral)))
            return {integral, estimate, evals};
    }
    if (estimate > std::max(tol, 1e-14 * std::abs(integral)))
        throw QuadratureFailure("integrate_interval: tolerance unmet at max refinement depth");
    return {integral, estimate, evals};
}

QuadratureResult integrate_half_one(const std::function<double(double, double)>& f,
                                    double s_one, double tol, int max_depth) {
    if (!(s_one > -1.0)) throw DomainError("integrate_half_one: s_one must exceed -1");
    return integrate_interval(
        [&f](double x, double /*da*/, double db) { return f(x, db); }, 0.5, 1.0,
        s_one, tol, max_depth);
}

}  // namespace fragarea

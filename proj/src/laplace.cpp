#include "fragarea/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "fragarea/errors.hpp"
#include "fragarea/textio.hpp"
#include "fragarea/specfun.hpp"

namespace fragarea {

double LaplaceGrid::operator()(double query) const {
    if (query <= 0.0) return 1.0;
    return std::exp(log_interp_(query));
}

void LaplaceGrid::rebuild_interpolant() {
    std::vector<double> lq(ell.size());
    for (std::size_t i = 0; i < ell.size(); ++i) lq[i] = std::log(ell[i]);
    log_interp_ = PchipInterpolant(q, lq);
}

double dyadic_laplace(double alpha, double q, double tol) {
    if (!(alpha < 0.0)) throw InvalidParameter("dyadic_laplace: alpha must be negative");
    if (!(q >= 0.0)) throw DomainError("dyadic_laplace: q must be non-negative");
    if (q == 0.0) return 1.0;
    const double ratio = std::exp2(alpha);
    double log_sum = 0.0;
    for (int n = 0;; ++n) {
        const double cn = std::exp2(n * (alpha - 1.0)) * q;  // argument of log1p
        double term;
        if (cn < 1e-8) {
            term = std::exp2(n * alpha) * q * (1.0 - 0.5 * cn);
        } else {
            term = std::exp2(static_cast<double>(n)) * std::log1p(cn);
        }
        log_sum += term;
        const double tail_bound = std::exp2((n + 1) * alpha) * q / (1.0 - ratio);
        if (tail_bound < tol) break;
    }
    return std::exp(-log_sum);
}

double dyadic_residual(double alpha, double q) {
    const double lq = dyadic_laplace(alpha, q);
    const double lh = dyadic_laplace(alpha, std::exp2(alpha - 1.0) * q);
    return std::abs(-q * lq - lq + lh * lh);
}

namespace {

// One application of the Proposition-style map to the transform `L`.
double fixed_point_rhs(const DislocationMeasure& nu, double lambda, double e,
                       const std::function<double(double)>& L, double qv) {
    const double integral =
        integrate_measure(
            nu,
            [&](double x, double omx) {
                return L(std::pow(x, e) * qv) * L(std::exp(e * std::log(omx)) * qv);
            },
            0.0, 1e-11)
            .value;
    return integral / (lambda + qv);
}

}  // namespace

LaplaceGrid solve_laplace_fixed_point(const FragmentationParams& params, double q_max,
                                      int grid_size, int max_iter, double tol) {
    validate(params);
    if (!(q_max > 0.0)) throw InvalidParameter("solve_laplace_fixed_point: q_max must be positive");
    if (grid_size < 8) throw InvalidParameter("solve_laplace_fixed_point: grid too small");
    const auto mass = total_mass(params.measure);
    if (!mass) throw NotFinite("solve_laplace_fixed_point: dislocation measure must be finite");
    const double lambda = *mass;
    const double e = 1.0 - params.alpha;
    const double m1 = 1.0 / phi(params.measure, -params.alpha);

    LaplaceGrid grid;
    grid.q.resize(grid_size);
    grid.q[0] = 0.0;
    const double q_min = q_max * 1e-6;
    const double ratio = std::pow(q_max / q_min, 1.0 / (grid_size - 2));
    for (int i = 1; i < grid_size; ++i) grid.q[i] = q_min * std::pow(ratio, i - 1);
    grid.q.back() = q_max;

    grid.ell.resize(grid_size);
    for (int i = 0; i < grid_size; ++i) grid.ell[i] = std::exp(-grid.q[i] * m1);
    grid.rebuild_interpolant();

    std::vector<double> next(grid_size, 1.0);
    const auto evaluate = [&grid](double qq) { return grid(qq); };
    for (int it = 0; it < max_iter; ++it) {
        double delta = 0.0;
        for (int i = 1; i < grid_size; ++i) {
            next[i] = fixed_point_rhs(params.measure, lambda, e, evaluate, grid.q[i]);
            delta = std::max(delta, std::abs(next[i] - grid.ell[i]));
        }
        std::copy(next.begin() + 1, next.end(), grid.ell.begin() + 1);
        grid.rebuild_interpolant();
        grid.iteration_deltas.push_back(delta);
        grid.iterations = it + 1;
        if (delta < tol) break;
    }
    if (grid.iteration_deltas.empty() || grid.iteration_deltas.back() >= tol)
        throw NoConvergence("solve_laplace_fixed_point: sup-norm change above tol at max_iter");

    grid.node_residual.assign(grid_size, 0.0);
    for (int i = 1; i < grid_size; ++i) {
        const double rhs = fixed_point_rhs(params.measure, lambda, e, evaluate, grid.q[i]);
        grid.node_residual[i] = std::abs(grid.ell[i] - rhs);
        grid.residual = std::max(grid.residual, grid.node_residual[i]);
    }
    return grid;
}

ResidualReport verify_monomial(const FragmentationParams& params, const MomentTable& table,
                               int k) {
    if (k < 1 || k > table.K) throw DomainError("verify_monomial: k out of table range");
    const double e = 1.0 - params.alpha;
    const double lhs = k * table.M[k - 1];

    // weights C(k,j) M_j M_{k-j} of the binomial expansion of <eta_x, a^k>
    std::vector<double> w(k, 0.0);
    for (int j = 1; j <= k - 1; ++j) {
        const double lb = log_gamma(k + 1.0) - log_gamma(j + 1.0) - log_gamma(k - j + 1.0);
        w[j] = std::exp(lb) * table.M[j] * table.M[k - j];
    }
    const double mk = table.M[k];
    const auto g = [&](double /*x*/, double omx) {
        double v = mk * split_bracket(k * e - 1.0, omx);
        const double lx = std::log1p(-omx), lo = std::log(omx);
        for (int j = 1; j <= k - 1; ++j) v -= w[j] * std::exp(j * e * lx + (k - j) * e * lo);
        return v;
    };
    const double rhs = integrate_measure(params.measure, g, 1.0, 1e-12).value;
    ResidualReport r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.abs_residual = std::abs(lhs - rhs);
    r.rel_residual = r.abs_residual / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    return r;
}

ResidualReport verify_exponential(const FragmentationParams& params,
                                  const std::function<double(double)>& laplace, double q) {
    if (!(q >= 0.0)) throw DomainError("verify_exponential: q must be non-negative");
    if (!total_mass(params.measure))
        throw NotFinite("verify_exponential: dislocation measure must be finite");
    const double e = 1.0 - params.alpha;
    const double lq = laplace(q);
    const double lhs = -q * lq;
    const auto g = [&](double x, double omx) {
        return lq - laplace(std::pow(x, e) * q) * laplace(std::exp(e * std::log(omx)) * q);
    };
    const double rhs = integrate_measure(params.measure, g, 1.0, 1e-12).value;
    ResidualReport r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.abs_residual = std::abs(lhs - rhs);
    r.rel_residual = r.abs_residual / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    return r;
}

std::function<double(double)> empirical_laplace(std::vector<double> samples) {
    if (samples.empty()) throw InsufficientSamples("empirical_laplace: no samples");
    return [samples = std::move(samples)](double q) {
        double acc = 0.0;
        for (double a : samples) acc += std::exp(-q * a);
        return acc / static_cast<double>(samples.size());
    };
}

void write_laplace_csv(std::ostream& os, const LaplaceGrid& grid) {
    os << "q,ell,residual\n";
    for (std::size_t i = 0; i < grid.q.size(); ++i) {
        const double res = i < grid.node_residual.size() ? grid.node_residual[i] : 0.0;
        os << format17(grid.q[i]) << ',' << format17(grid.ell[i]) << ',' << format17(res)
           << '\n';
    }
}

}  // namespace fragarea

#include "fragarea/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fragarea/errors.hpp"
#include "fragarea/specfun.hpp"

namespace fragarea {
namespace {

constexpr double kBrownianC = 0.79788456080286541;  // 2 / sqrt(2 pi)
constexpr double kSumTol = 1e-12;

double brownian_density(double x, double omx) {
    return kBrownianC * std::pow(x * omx, -1.5);
}

double beta_density(const BetaMeasure& m, double x, double omx) {
    return m.c * std::exp(m.beta * (std::log(x) + std::log(omx)));
}

}  // namespace

double split_bracket(double q, double omx) {
    const double e = 1.0 + q;
    return -std::expm1(e * std::log1p(-omx)) - std::exp(e * std::log(omx));
}

MassPartition::MassPartition(std::vector<double> masses) : masses_(std::move(masses)) {
    double sum = 0.0;
    double prev = 1.0;
    for (double m : masses_) {
        if (!(m > 0.0) || m > 1.0)
            throw InvalidParameter("mass partition: entries must lie in (0, 1]");
        if (m > prev + kSumTol)
            throw InvalidParameter("mass partition: masses must be non-increasing");
        prev = m;
        sum += m;
    }
    if (sum > 1.0 + kSumTol)
        throw InvalidParameter("mass partition: total mass exceeds 1");
}

void validate(const DislocationMeasure& nu) {
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, BrownianMeasure>) {
                // no parameters
            } else if constexpr (std::is_same_v<T, BetaMeasure>) {
                if (!(m.c > 0.0)) throw InvalidParameter("beta: c must be positive");
                if (!(m.beta > -2.0 && m.beta < -1.0))
                    throw InvalidParameter("beta: beta must lie in (-2, -1)");
            } else if constexpr (std::is_same_v<T, AtomicMeasure>) {
                if (m.atoms.empty()) throw EmptyMeasure("atomic: no atoms");
                for (const Atom& a : m.atoms) {
                    if (!(a.x >= 0.5 && a.x < 1.0))
                        throw InvalidParameter("atomic: atom location must lie in [1/2, 1)");
                    if (!(a.w > 0.0)) throw InvalidParameter("atomic: atom weight must be positive");
                }
            } else if constexpr (std::is_same_v<T, DensityMeasure>) {
                if (!m.density) throw InvalidParameter("density: missing density function");
                if (!(m.x_max > 0.5 && m.x_max <= 1.0))
                    throw InvalidParameter("density: x_max must lie in (1/2, 1]");
                if (!(m.s_one > -2.0))
                    throw DivergentIntegral("density: s_one <= -2 makes int (1-x) nu(dx) diverge");
                if (!(m.s_half > -1.0))
                    throw DivergentIntegral("density: s_half <= -1 makes the measure diverge at 1/2");
            }
        },
        nu);
    // Numeric side of the integral condition.
    double e9;
    try {
        e9 = e9_mass(nu);
    } catch (const QuadratureFailure& e) {
        throw DivergentIntegral(std::string("int (1-x) nu(dx) did not converge: ") + e.what());
    }
    if (!std::isfinite(e9)) throw DivergentIntegral("int (1-x) nu(dx) is not finite");
    if (!(e9 > 0.0)) throw EmptyMeasure("measure is identically zero");
}

void validate(const FragmentationParams& params) {
    validate(params.measure);
    if (!(params.alpha < 0.0))
        throw InvalidParameter("alpha: self-similarity index must be negative");
}

std::string validate_diagnostic(const DislocationMeasure& nu) {
    try {
        validate(nu);
        return {};
    } catch (const Error& e) {
        return std::string(e.code()) + ": " + e.what();
    }
}

double support_upper(const DislocationMeasure& nu) {
    if (const auto* d = std::get_if<DensityMeasure>(&nu)) return d->x_max;
    return 1.0;
}

double density_s_right(const DislocationMeasure& nu) {
    return std::visit(
        [](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, BrownianMeasure>) {
                return -1.5;
            } else if constexpr (std::is_same_v<T, BetaMeasure>) {
                return m.beta;
            } else if constexpr (std::is_same_v<T, DensityMeasure>) {
                return m.x_max < 1.0 ? 0.0 : m.s_one;
            } else {
                throw DomainError("density exponent undefined for atomic measures");
            }
        },
        nu);
}

double density_at(const DislocationMeasure& nu, double x, double omx) {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, BrownianMeasure>) {
                return brownian_density(x, omx);
            } else if constexpr (std::is_same_v<T, BetaMeasure>) {
                return beta_density(m, x, omx);
            } else if constexpr (std::is_same_v<T, DensityMeasure>) {
                return m.density(x);
            } else {
                throw DomainError("atomic measures have no density");
            }
        },
        nu);
}

QuadratureResult integrate_measure(const DislocationMeasure& nu,
                                   const std::function<double(double, double)>& g,
                                   double g_upper_exponent, double tol) {
    if (const auto* am = std::get_if<AtomicMeasure>(&nu)) {
        QuadratureResult r;
        for (const Atom& a : am->atoms) {
            r.value += a.w * g(a.x, 1.0 - a.x);
            ++r.evaluations;
        }
        return r;
    }
    const double b = support_upper(nu);
    const double one_minus_b = 1.0 - b;
    const double s_right = density_s_right(nu) + g_upper_exponent;
    return integrate_interval(
        [&](double x, double /*da*/, double db) {
            const double omx = one_minus_b + db;
            return g(x, omx) * density_at(nu, x, omx);
        },
        0.5, b, s_right, tol);
}

double e9_mass(const DislocationMeasure& nu) {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, BrownianMeasure>) {
                // int (1-x) nu(dx) = 2 sqrt(2/pi); antiderivative -2 sqrt((1-x)/x)
                // of x^{-3/2} (1-x)^{-1/2} evaluated over [1/2, 1).
                return 2.0 * kBrownianC;
            } else if constexpr (std::is_same_v<T, AtomicMeasure>) {
                double s = 0.0;
                for (const Atom& a : m.atoms) s += a.w * (1.0 - a.x);
                return s;
            } else {
                return integrate_measure(
                           nu, [](double, double omx) { return omx; }, 1.0, 1e-10)
                    .value;
            }
        },
        nu);
}

double phi(const DislocationMeasure& nu, double q) {
    if (!(q >= 0.0)) throw DomainError("phi: q must be non-negative");
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, BrownianMeasure>) {
                if (q == 0.0) return 0.0;
                return 2.8284271247461903 * std::exp(log_gamma(q + 0.5) - log_gamma(q));
            } else if constexpr (std::is_same_v<T, BetaMeasure>) {
                const double b = m.beta;
                const double b00 = beta_fn(b + 2.0, b + 2.0);
                const double bq = beta_fn(b + 2.0 + q, b + 2.0);
                return m.c / (b + 1.0) * ((2.0 * b + 3.0) * b00 - (2.0 * b + 3.0 + q) * bq);
            } else if constexpr (std::is_same_v<T, AtomicMeasure>) {
                double s = 0.0;
                for (const Atom& a : m.atoms) s += a.w * split_bracket(q, 1.0 - a.x);
                return s;
            } else {
                return phi_quadrature(nu, q).value;
            }
        },
        nu);
}

QuadratureResult phi_quadrature(const DislocationMeasure& nu, double q, double tol) {
    if (!(q >= 0.0)) throw DomainError("phi: q must be non-negative");
    if (std::holds_alternative<AtomicMeasure>(nu))
        throw DomainError("phi_quadrature: atomic measures are evaluated exactly");
    // The bracket vanishes like (1+q)(1-x) at 1 for q > 0 and is identically
    // zero at q = 0.
    return integrate_measure(
        nu, [q](double, double omx) { return split_bracket(q, omx); }, 1.0, tol);
}

DislocationMeasure truncate(const DislocationMeasure& nu, int n) {
    if (n < 2) throw InvalidParameter("truncate: n must be >= 2");
    const double cut = 1.0 - 1.0 / static_cast<double>(n);
    return std::visit(
        [&](const auto& m) -> DislocationMeasure {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, AtomicMeasure>) {
                AtomicMeasure out;
                for (const Atom& a : m.atoms)
                    if (1.0 - a.x > 1.0 / static_cast<double>(n)) out.atoms.push_back(a);
                if (out.atoms.empty())
                    throw EmptyMeasure("truncate: every atom has 1-x <= 1/n");
                return out;
            } else if constexpr (std::is_same_v<T, BrownianMeasure>) {
                if (!(cut > 0.5)) throw EmptyMeasure("truncate: empty support, n too small");
                return DensityMeasure{
                    [](double x) { return brownian_density(x, 1.0 - x); }, 0.0, 0.0, cut};
            } else if constexpr (std::is_same_v<T, BetaMeasure>) {
                if (!(cut > 0.5)) throw EmptyMeasure("truncate: empty support, n too small");
                return DensityMeasure{
                    [m](double x) { return beta_density(m, x, 1.0 - x); }, 0.0, 0.0, cut};
            } else {
                const double xm = std::min(m.x_max, cut);
                if (!(xm > 0.5)) throw EmptyMeasure("truncate: empty support, n too small");
                DensityMeasure out = m;
                out.x_max = xm;
                if (xm < m.x_max) out.s_one = 0.0;
                return out;
            }
        },
        nu);
}

std::optional<double> total_mass(const DislocationMeasure& nu) {
    return std::visit(
        [&](const auto& m) -> std::optional<double> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, AtomicMeasure>) {
                double s = 0.0;
                for (const Atom& a : m.atoms) s += a.w;
                return s;
            } else if constexpr (std::is_same_v<T, BrownianMeasure>) {
                return std::nullopt;  // density ~ (1-x)^{-3/2} at 1
            } else if constexpr (std::is_same_v<T, BetaMeasure>) {
                return std::nullopt;  // beta < -1 throughout the valid range
            } else {
                if (m.x_max >= 1.0 && m.s_one <= -1.0) return std::nullopt;
                return integrate_measure(
                           nu, [](double, double) { return 1.0; }, 0.0, 1e-10)
                    .value;
            }
        },
        nu);
}

SplitSampler::SplitSampler(const DislocationMeasure& nu) {
    const auto mass = total_mass(nu);
    if (!mass || !(*mass > 0.0))
        throw NotFinite("split sampler requires a finite positive total mass");
    rate_ = *mass;

    if (const auto* am = std::get_if<AtomicMeasure>(&nu)) {
        double acc = 0.0;
        for (const Atom& a : am->atoms) {
            acc += a.w / rate_;
            atom_x_.push_back(a.x);
            atom_cdf_.push_back(acc);
        }
        atom_cdf_.back() = 1.0;
        return;
    }

    // Continuous variant: cell-by-cell CDF on a grid refined geometrically
    // toward the upper support end, inverted with a monotone cubic. The
    // grid is refined until the inverse is within 1e-8 in CDF.
    const double a = 0.5;
    const double b = support_upper(nu);
    const double s_top = density_s_right(nu);
    const double width = b - a;

    std::vector<double> nodes;
    const int n_lin = 2048, n_geo = 2048;
    for (int i = 0; i < n_lin; ++i)
        nodes.push_back(a + width * static_cast<double>(i) / n_lin);
    for (int j = 1; j <= n_geo; ++j)
        nodes.push_back(b - width * std::pow(10.0, -8.0 * j / n_geo));
    nodes.push_back(b);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end(),
                            [&](double u, double v) { return v - u < 1e-13 * width; }),
                nodes.end());
    nodes.back() = b;

    const auto cell_mass = [&](double lo, double hi) {
        const double s_right = (hi >= b) ? s_top : 0.0;
        const double one_minus_b = 1.0 - b;
        return integrate_interval(
                   [&](double x, double /*da*/, double db) {
                       const double omx = (hi >= b) ? one_minus_b + db : 1.0 - x;
                       return density_at(nu, x, omx);
                   },
                   lo, hi, s_right, 1e-12, 14)
            .value;
    };

    for (int round = 0; round < 4; ++round) {
        std::vector<double> cdf(nodes.size(), 0.0);
        for (std::size_t i = 1; i < nodes.size(); ++i)
            cdf[i] = cdf[i - 1] + cell_mass(nodes[i - 1], nodes[i]);
        const double ftot = cdf.back();
        if (!(ftot > 0.0)) throw EmptyMeasure("split sampler: zero mass on support");

        std::vector<double> fk, xk;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double u = cdf[i] / ftot;
            if (!fk.empty() && !(u > fk.back() + 1e-15)) continue;
            fk.push_back(u);
            xk.push_back(nodes[i]);
        }
        fk.front() = 0.0;
        fk.back() = 1.0;
        inverse_cdf_ = PchipInterpolant(fk, xk);

        // Verify midpoint inversion accuracy in CDF units.
        std::vector<double> refine;
        for (std::size_t i = 1; i < fk.size(); ++i) {
            const double umid = 0.5 * (fk[i - 1] + fk[i]);
            const double xhat = inverse_cdf_(umid);
            if (!(xhat > xk[i - 1] && xhat < xk[i])) continue;
            const double fhat = fk[i - 1] + cell_mass(xk[i - 1], xhat) / ftot;
            if (std::abs(fhat - umid) > 1e-8) refine.push_back(0.5 * (xk[i - 1] + xk[i]));
        }
        if (refine.empty()) return;
        nodes.insert(nodes.end(), refine.begin(), refine.end());
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    }
    throw QuadratureFailure("split sampler: inverse CDF did not reach tolerance 1e-8");
}

double SplitSampler::sample(RandomStream& rng) const {
    const double u = rng.uniform();
    if (!atom_x_.empty()) {
        const auto it = std::upper_bound(atom_cdf_.begin(), atom_cdf_.end(), u);
        const std::size_t idx =
            std::min(static_cast<std::size_t>(it - atom_cdf_.begin()), atom_x_.size() - 1);
        return atom_x_[idx];
    }
    return inverse_cdf_(u);
}

}  // namespace fragarea

#include "fragarea/moments.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "fragarea/errors.hpp"
#include "fragarea/textio.hpp"
#include "fragarea/specfun.hpp"

namespace fragarea {
namespace {

constexpr double kSqrtTwoPi = 2.5066282746310002;
constexpr double kSqrtPi = 1.7724538509055161;

double log_binomial(int k, int j) {
    return log_gamma(k + 1.0) - log_gamma(j + 1.0) - log_gamma(k - j + 1.0);
}

void check_order(const FragmentationParams& params, int k) {
    if (k < 1) throw DomainError("moment order k must be >= 1");
    if (!(params.alpha < 0.0)) throw InvalidParameter("alpha must be negative");
}

}  // namespace

double coeff_a(const FragmentationParams& params, int k) {
    check_order(params, k);
    const double q = k * (1.0 - params.alpha) - 1.0;
    return phi(params.measure, q);
}

QuadratureResult coeff_a_quadrature(const FragmentationParams& params, int k, double tol) {
    check_order(params, k);
    const double q = k * (1.0 - params.alpha) - 1.0;
    return phi_quadrature(params.measure, q, tol);
}

double coeff_a_jk(const FragmentationParams& params, int j, int k) {
    check_order(params, k);
    if (!(j >= 1 && j < k)) throw DomainError("coeff_a_jk requires 1 <= j < k");
    const double e = 1.0 - params.alpha;
    const double p = j * e, r = (k - j) * e;
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, BrownianMeasure>) {
                return std::exp(log_binomial(k, j) + log_beta(p - 0.5, r - 0.5)) / kSqrtTwoPi;
            } else if constexpr (std::is_same_v<T, BetaMeasure>) {
                return 0.5 * m.c *
                       std::exp(log_binomial(k, j) + log_beta(m.beta + p + 1.0, m.beta + r + 1.0));
            } else if constexpr (std::is_same_v<T, AtomicMeasure>) {
                double s = 0.0;
                for (const Atom& a : m.atoms)
                    s += a.w * std::pow(a.x, p) * std::pow(1.0 - a.x, r);
                return std::exp(log_binomial(k, j)) * s;
            } else {
                return coeff_a_jk_quadrature(params, j, k).value;
            }
        },
        params.measure);
}

QuadratureResult coeff_a_jk_quadrature(const FragmentationParams& params, int j, int k,
                                       double tol) {
    check_order(params, k);
    if (!(j >= 1 && j < k)) throw DomainError("coeff_a_jk requires 1 <= j < k");
    const double e = 1.0 - params.alpha;
    const double p = j * e, r = (k - j) * e;
    const DislocationMeasure& nu = params.measure;
    const double b = support_upper(nu);
    const double one_minus_b = 1.0 - b;
    const double binom = std::exp(log_binomial(k, j));
    const bool symmetric = std::holds_alternative<BrownianMeasure>(nu) ||
                           std::holds_alternative<BetaMeasure>(nu);
    if (std::holds_alternative<AtomicMeasure>(nu))
        throw DomainError("coeff_a_jk_quadrature: atomic measures are evaluated exactly");
    const double s_right = density_s_right(nu) + (symmetric ? std::min(p, r) : r);
    return integrate_interval(
        [&](double x, double /*da*/, double db) {
            const double omx = one_minus_b + db;
            const double lx = std::log1p(-omx), lo = std::log(omx);
            double core = std::exp(p * lx + r * lo);
            if (symmetric) core = 0.5 * (core + std::exp(r * lx + p * lo));
            return binom * core * density_at(nu, x, omx);
        },
        0.5, b, s_right, tol);
}

MomentTable moment_table(const FragmentationParams& params, int K) {
    if (K < 0) throw DomainError("moment_table: K must be >= 0");
    validate(params);
    MomentTable t;
    t.K = K;
    t.alpha = params.alpha;
    t.M.assign(K + 1, 0.0);
    t.M[0] = 1.0;
    const bool closed = !std::holds_alternative<DensityMeasure>(params.measure);
    const CoeffMethod method = closed ? CoeffMethod::closed_form : CoeffMethod::quadrature;
    for (int k = 1; k <= K; ++k) {
        const double ak = coeff_a(params, k);
        if (!(ak > 0.0)) throw Error("moment recursion: coefficient a_k is not positive");
        t.a.push_back(ak);
        t.method_a.push_back(method);
        double rhs = k * t.M[k - 1];
        if (k >= 2) {
            std::vector<double> row, mrow;
            for (int j = 1; j <= k - 1; ++j) {
                const double ajk = coeff_a_jk(params, j, k);
                row.push_back(ajk);
                mrow.push_back(ajk * t.M[j] * t.M[k - j]);
            }
            for (double v : mrow) rhs += v;
            t.a_jk.push_back(std::move(row));
            t.method_a_jk.emplace_back(k - 1, method);
        }
        t.M[k] = rhs / ak;
        t.bound.push_back(moment_upper_bound(params, k));
    }
    return t;
}

TakacsTable takacs_table(int K) {
    using boost::multiprecision::cpp_rational;
    if (K < 0) throw DomainError("takacs_table: K must be >= 0");
    TakacsTable t;
    t.K = K;
    t.k_seq.assign(K + 1, cpp_rational(0));
    t.k_seq[0] = cpp_rational(-1, 2);
    for (int k = 1; k <= K; ++k) {
        cpp_rational v = cpp_rational(3 * k - 4, 4) * t.k_seq[k - 1];
        for (int j = 1; j <= k - 1; ++j) v += t.k_seq[j] * t.k_seq[k - j];
        t.k_seq[k] = v;
    }
    t.moments.assign(K + 1, 0.0);
    t.moments[0] = 1.0;
    for (int k = 1; k <= K; ++k) {
        const double lognorm = std::log(4.0 * kSqrtPi) - 0.5 * k * std::log(2.0) +
                               log_gamma(k + 1.0) - log_gamma((3.0 * k - 1.0) / 2.0);
        t.moments[k] = std::exp(lognorm) * t.k_seq[k].convert_to<double>();
    }
    return t;
}

double tagged_fragment_moment(const FragmentationParams& params, int k) {
    check_order(params, k);
    double denom_log = 0.0;
    for (int j = 1; j <= k; ++j) {
        const double pj = phi(params.measure, -params.alpha * j);
        if (!(pj > 0.0)) throw Error("tagged fragment moment: Phi(-j alpha) is not positive");
        denom_log += std::log(pj);
    }
    return std::exp(log_gamma(k + 1.0) - denom_log);
}

double moment_upper_bound(const FragmentationParams& params, int k) {
    return k * tagged_fragment_moment(params, k);
}

double mean_area_for_partition(const FragmentationParams& params, const MassPartition& x) {
    const double m1 = 1.0 / phi(params.measure, -params.alpha);
    double scale = 0.0;
    for (double m : x.masses()) scale += std::pow(m, 1.0 - params.alpha);
    return scale * m1;
}

void write_moments_csv(std::ostream& os, const MomentTable& t) {
    os << "k,a_k,M_k,bound_k,bound_ok\n";
    os << "0,," << format17(t.M[0]) << ",,\n";
    for (int k = 1; k <= t.K; ++k) {
        const bool ok = t.M[k] <= t.bound[k - 1] * (1.0 + 1e-12);
        os << k << ',' << format17(t.a[k - 1]) << ',' << format17(t.M[k]) << ','
           << format17(t.bound[k - 1]) << ',' << (ok ? "true" : "false") << '\n';
    }
}

void write_coeffs_csv(std::ostream& os, const MomentTable& t) {
    os << "j,k,a_jk\n";
    for (int k = 2; k <= t.K; ++k)
        for (int j = 1; j <= k - 1; ++j)
            os << j << ',' << k << ',' << format17(t.ajk(j, k)) << '\n';
}

}  // namespace fragarea

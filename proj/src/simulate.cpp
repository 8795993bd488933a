#include "fragarea/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fragarea/errors.hpp"

namespace fragarea {

RdeSampler::RdeSampler(const FragmentationParams& params, const SimConfig& config)
    : alpha_(params.alpha),
      one_minus_alpha_(1.0 - params.alpha),
      epsilon_(config.epsilon),
      mode_(config.residual_mode),
      budget_(config.max_fragments),
      tail_m1_(1.0 / phi(params.measure, -params.alpha)),
      splitter_(params.measure) {
    if (!(params.alpha < 0.0)) throw InvalidParameter("rde sampler: alpha must be negative");
    if (!(config.epsilon > 0.0 && config.epsilon < 1.0))
        throw InvalidParameter("rde sampler: epsilon must lie in (0,1)");
    if (const auto* am = std::get_if<AtomicMeasure>(&params.measure);
        am && am->atoms.size() == 1) {
        single_atom_ = true;
        atom_x_ = am->atoms.front().x;
    }
}

RdeSampler::Stats RdeSampler::sample_stats(RandomStream& rng) const {
    // Work stack keyed by exact mass, largest first. Children are strictly
    // smaller than their parent, so equal masses always coalesce before
    // their group is processed.
    std::map<double, std::uint64_t, std::greater<double>> stack;
    stack.emplace(1.0, 1);
    Stats st;

    const auto child = [&](double m, std::uint64_t c) {
        if (m >= epsilon_) {
            stack[m] += c;
            return;
        }
        st.killed += c;
        if (mode_ == ResidualMode::expected_tail) {
            const double t = static_cast<double>(c) * std::pow(m, one_minus_alpha_) * tail_m1_;
            st.area += t;
            st.tail_mean_added += t;
        }
    };

    const double rate = splitter_.rate();
    while (!stack.empty()) {
        const auto it = stack.begin();
        const double m = it->first;
        const std::uint64_t c = it->second;
        stack.erase(it);

        st.fragments += c;
        st.work_units += single_atom_ ? 1 : c;
        if (st.work_units > budget_)
            throw BudgetExceeded("rde sampler: max_fragments budget exhausted");

        st.area += std::pow(m, one_minus_alpha_) * rng.exponential_sum(c, rate);

        if (single_atom_) {
            child(m * atom_x_, c);
            child(m * (1.0 - atom_x_), c);
        } else {
            for (std::uint64_t i = 0; i < c; ++i) {
                const double x = splitter_.sample(rng);
                child(m * x, 1);
                child(m * (1.0 - x), 1);
            }
        }
    }
    return st;
}

double sample_area_rde(const FragmentationParams& params, const SimConfig& config,
                       RandomStream& rng) {
    return RdeSampler(params, config).sample(rng);
}

double sample_area_truncated(const FragmentationParams& params, int n_trunc,
                             const SimConfig& config, RandomStream& rng) {
    FragmentationParams truncated{truncate(params.measure, n_trunc), params.alpha};
    return RdeSampler(truncated, config).sample(rng);
}

double sample_excursion_area(int n_steps, RandomStream& rng) {
    if (n_steps < 2) throw InvalidParameter("excursion sampler: n_steps must be >= 2");
    const int n = n_steps;
    static thread_local std::vector<double> walk;
    walk.assign(n + 1, 0.0);
    const double sd = 1.0 / std::sqrt(static_cast<double>(n));
    for (int i = 1; i <= n; ++i) walk[i] = walk[i - 1] + sd * rng.normal();

    // Bridge B_j = W_j - (j/n) W_n. The excursion is the cyclic shift at
    // the bridge minimum; its trapezoid integral is mean(B) - min(B).
    const double wn = walk[n];
    double sum = 0.0, lo = 0.0;
    for (int j = 0; j < n; ++j) {
        const double b = walk[j] - wn * (static_cast<double>(j) / n);
        sum += b;
        lo = std::min(lo, b);
    }
    return sum / n - lo;
}

double HomogeneousPath::s_at(double t) const {
    if (t <= times.front()) return s_values.front();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
    return s_values[i];
}

double HomogeneousPath::riemann_sum(int k) const {
    if (k < 1) throw DomainError("riemann_sum: k must be >= 1");
    if (k > horizon + 1e-12) throw DomainError("riemann_sum: grid extends past the horizon");
    double acc = 0.0;
    for (int l = 1; l <= k * k; ++l) acc += s_at(static_cast<double>(l) / k);
    return acc / k;
}

HomogeneousPath simulate_homogeneous(const FragmentationParams& params, int k, double t_max,
                                     RandomStream& rng) {
    if (k < 1) throw DomainError("simulate_homogeneous: k must be >= 1");
    if (!(params.alpha < 0.0))
        throw InvalidParameter("simulate_homogeneous: alpha must be negative");
    const SplitSampler splitter(params.measure);
    const double lambda = splitter.rate();
    const double e = 1.0 - params.alpha;
    const double phi_ma = phi(params.measure, -params.alpha);

    HomogeneousPath path;
    path.riemann_k = k;
    path.horizon = std::max(t_max, static_cast<double>(k));
    path.times.push_back(0.0);
    path.s_values.push_back(1.0);

    std::vector<double> masses{1.0};
    double s = 1.0;
    double t = 0.0;
    while (s > 1e-12) {
        const double total_rate = lambda * static_cast<double>(masses.size());
        const double t_next = t + rng.exponential(total_rate);
        if (t_next >= path.horizon) break;
        const std::size_t idx = std::min(
            static_cast<std::size_t>(rng.uniform() * static_cast<double>(masses.size())),
            masses.size() - 1);
        const double m = masses[idx];
        const double x = splitter.sample(rng);
        masses[idx] = m * x;
        masses.push_back(m * (1.0 - x));
        // (x^e + (1-x)^e - 1) < 0 holds in floating point for x in [1/2,1),
        // so the stored S sequence is genuinely non-increasing.
        s += std::pow(m, e) * (std::pow(x, e) + std::pow(1.0 - x, e) - 1.0);
        t = t_next;
        path.times.push_back(t);
        path.s_values.push_back(s);
    }

    double area = 0.0;
    for (std::size_t i = 0; i + 1 < path.times.size(); ++i)
        area += path.s_values[i] * (path.times[i + 1] - path.times[i]);
    area += path.s_values.back() * (path.horizon - path.times.back());
    path.tail_added = path.s_values.back() / phi_ma;
    path.area = area + path.tail_added;
    path.final_masses = std::move(masses);
    return path;
}

double riemann_gap_formula(const FragmentationParams& params, int k) {
    if (k < 1) throw DomainError("riemann_gap_formula: k must be >= 1");
    const double p = phi(params.measure, -params.alpha);
    const double kk = static_cast<double>(k);
    return 1.0 / p + std::expm1(-kk * p) / (kk * std::expm1(p / kk));
}

EstimatorSummary estimate_moments(std::span<const double> samples, int k_max) {
    if (samples.size() < 2) throw InsufficientSamples("estimate_moments: need n >= 2");
    if (k_max < 1) throw DomainError("estimate_moments: k_max must be >= 1");
    EstimatorSummary s;
    s.n = samples.size();
    const double n = static_cast<double>(samples.size());
    for (int j = 1; j <= k_max; ++j) {
        double mean = 0.0;
        for (double a : samples) mean += std::pow(a, j);
        mean /= n;
        double var = 0.0;
        for (double a : samples) {
            const double d = std::pow(a, j) - mean;
            var += d * d;
        }
        var /= (n - 1.0);
        s.moments.push_back(mean);
        s.stderrs.push_back(std::sqrt(var / n));
    }
    return s;
}

namespace {

// Exceptions must not escape an OpenMP region; the first one is kept and
// rethrown after the loop.
struct BatchErrors {
    std::exception_ptr first = nullptr;
    void capture() {
#ifdef _OPENMP
#pragma omp critical(fragarea_batch_error)
#endif
        {
            if (!first) first = std::current_exception();
        }
    }
    void rethrow() const {
        if (first) std::rethrow_exception(first);
    }
};

}  // namespace

std::vector<double> run_batch(std::uint64_t n, std::uint64_t seed, int workers,
                              const std::function<double(RandomStream&)>& kernel) {
    std::vector<double> out(n);
    if (workers == 1) {
        // Serial reference path, kept free of OpenMP for testing.
        for (std::uint64_t i = 0; i < n; ++i) {
            RandomStream rs = stream_for(seed, i);
            out[i] = kernel(rs);
        }
        return out;
    }
    BatchErrors errors;
#ifdef _OPENMP
    if (workers > 1) omp_set_num_threads(workers);
#pragma omp parallel for schedule(dynamic, 64)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        try {
            RandomStream rs = stream_for(seed, static_cast<std::uint64_t>(i));
            out[static_cast<std::uint64_t>(i)] = kernel(rs);
        } catch (...) {
            errors.capture();
        }
    }
    errors.rethrow();
    return out;
}

std::vector<std::vector<double>> run_batch_rows(
    std::uint64_t n, std::uint64_t seed, int workers, std::size_t width,
    const std::function<void(RandomStream&, std::span<double>)>& kernel) {
    std::vector<std::vector<double>> out(n, std::vector<double>(width, 0.0));
    if (workers == 1) {
        for (std::uint64_t i = 0; i < n; ++i) {
            RandomStream rs = stream_for(seed, i);
            kernel(rs, out[i]);
        }
        return out;
    }
    BatchErrors errors;
#ifdef _OPENMP
    if (workers > 1) omp_set_num_threads(workers);
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        try {
            RandomStream rs = stream_for(seed, static_cast<std::uint64_t>(i));
            kernel(rs, out[static_cast<std::uint64_t>(i)]);
        } catch (...) {
            errors.capture();
        }
    }
    errors.rethrow();
    return out;
}

void dump_samples_text(std::ostream& os, std::span<const double> samples) {
    char buf[40];
    for (double v : samples) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", v);
        os << buf;
    }
}

void dump_samples_binary(std::ostream& os, std::span<const double> samples) {
    static_assert(sizeof(double) == 8);
    os.write(reinterpret_cast<const char*>(samples.data()),
             static_cast<std::streamsize>(samples.size() * sizeof(double)));
}

}  // namespace fragarea

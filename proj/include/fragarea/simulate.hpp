#ifndef FRAGAREA_SIMULATE_HPP_
#define FRAGAREA_SIMULATE_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "fragarea/measures.hpp"
#include "fragarea/rng.hpp"

namespace fragarea {

enum class ResidualMode { expected_tail, zero_tail };

struct SimConfig {
    double epsilon = 1e-6;  // mass cutoff in (0,1)
    ResidualMode residual_mode = ResidualMode::expected_tail;
    std::uint64_t n_samples = 1;
    std::uint64_t seed = 0;
    std::uint64_t max_fragments = 100'000'000;  // work-unit budget per sample
};

struct EstimatorSummary {
    std::uint64_t n = 0;
    std::vector<double> moments;  // m_1..m_k
    std::vector<double> stderrs;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
};

/// Samples the area law A(1) of a self-similar fragmentation with finite
/// dislocation measure via the branching identity at the first split:
/// each fragment of mass m contributes m^{1-alpha} Exp(nu(m)) to the area
/// and splits into (m x, m (1-x)), x ~ nu/nu(m), until the mass cutoff.
///
/// Fragments sharing the same mass are processed as one group (their
/// waiting-time sum is a Gamma variate), which keeps the dyadic-style
/// measures at O(log 1/epsilon) work per sample. One group counts as one
/// work unit against max_fragments, plus one unit per individually split
/// fragment.
///
/// Fragments below epsilon contribute their exact conditional mean
/// m^{1-alpha}/Phi(-alpha) (expected-tail mode, unbiased for the mean) or
/// nothing (zero-tail mode).
class RdeSampler {
public:
    RdeSampler(const FragmentationParams& params, const SimConfig& config);

    struct Stats {
        double area = 0.0;
        double tail_mean_added = 0.0;
        std::uint64_t killed = 0;
        std::uint64_t fragments = 0;   // individual fragments processed
        std::uint64_t work_units = 0;  // budgeted operations
    };

    double sample(RandomStream& rng) const { return sample_stats(rng).area; }
    Stats sample_stats(RandomStream& rng) const;

    double rate() const { return splitter_.rate(); }
    double tail_mean_factor() const { return tail_m1_; }

private:
    double alpha_;
    double one_minus_alpha_;
    double epsilon_;
    ResidualMode mode_;
    std::uint64_t budget_;
    double tail_m1_;  // 1/Phi(-alpha) of the simulated measure
    SplitSampler splitter_;
    bool single_atom_ = false;
    double atom_x_ = 0.0;
};

/// One draw from the area law of a finite-measure fragmentation.
double sample_area_rde(const FragmentationParams& params, const SimConfig& config,
                       RandomStream& rng);

/// One draw from the truncated law eta^(n): the measure is restricted to
/// {1 - x > 1/n_trunc} first, which converges weakly to eta as n grows.
double sample_area_truncated(const FragmentationParams& params, int n_trunc,
                             const SimConfig& config, RandomStream& rng);

/// One approximate sample of the Brownian excursion area: a Gaussian
/// bridge on n_steps uniform time points, cyclically shifted at its
/// minimum, integrated with the trapezoid rule. Discretization bias of the
/// mean is O(n_steps^{-1/2}).
double sample_excursion_area(int n_steps, RandomStream& rng);

/// Event record of a homogeneous (mass-independent split rate)
/// fragmentation: the statistic S(t) = sum_i m_i(t)^{1-alpha} is piecewise
/// constant between events and non-increasing. The area integral carries
/// an exact conditional-mean tail S(horizon)/Phi(-alpha) past the horizon.
struct HomogeneousPath {
    std::vector<double> times;     // event times, first entry 0
    std::vector<double> s_values;  // S on [times[i], times[i+1})
    std::vector<double> final_masses;
    double horizon = 0.0;
    double area = 0.0;        // int_0^inf S dt estimate (tail included)
    double tail_added = 0.0;  // conditional-mean tail past the horizon
    int riemann_k = 1;

    double s_at(double t) const;
    /// A_k = (1/k) sum_{l=1}^{k^2} S(l/k); requires k <= horizon.
    double riemann_sum(int k) const;
};

/// Simulate one homogeneous path up to max(t_max, k) where k is the
/// Riemann grid index of interest.
HomogeneousPath simulate_homogeneous(const FragmentationParams& params, int k, double t_max,
                                     RandomStream& rng);

/// Closed form for E|A - A_k| of the homogeneous path statistic:
/// 1/Phi(-alpha) - k^{-1} (1 - exp(-k Phi(-alpha))) / (exp(Phi(-alpha)/k) - 1).
double riemann_gap_formula(const FragmentationParams& params, int k);

/// Sample moments m_j = n^{-1} sum a_i^j with standard errors
/// sqrt(Var(a^j)/n), j = 1..k_max. Throws InsufficientSamples for n < 2.
EstimatorSummary estimate_moments(std::span<const double> samples, int k_max);

/// Run `kernel` once per sample index with the stream derived from
/// (seed, index). workers == 1 uses the serial reference loop; other
/// values run the OpenMP kernel (0 = library default thread count).
/// Results are written by index, so output is identical for any worker
/// count.
std::vector<double> run_batch(std::uint64_t n, std::uint64_t seed, int workers,
                              const std::function<double(RandomStream&)>& kernel);

/// Row-valued variant for kernels producing several statistics per sample.
std::vector<std::vector<double>> run_batch_rows(
    std::uint64_t n, std::uint64_t seed, int workers, std::size_t width,
    const std::function<void(RandomStream&, std::span<double>)>& kernel);

/// Raw sample dumps: text (one value per line, 17 significant digits) or
/// little-endian 64-bit floats.
void dump_samples_text(std::ostream& os, std::span<const double> samples);
void dump_samples_binary(std::ostream& os, std::span<const double> samples);

}  // namespace fragarea

#endif  // FRAGAREA_SIMULATE_HPP_

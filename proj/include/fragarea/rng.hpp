#ifndef FRAGAREA_RNG_HPP_
#define FRAGAREA_RNG_HPP_

#include <cmath>
#include <cstdint>

namespace fragarea {

/// SplitMix64 mixer. Used to expand (seed, stream index) pairs into
/// well-spread 64-bit seed material for the main engine.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// xoshiro256** (Blackman/Vigna). 256-bit state, seeded from SplitMix64
/// so that distinct (seed, index) streams start at well-separated states.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

/// One independent random stream: an engine plus the variate transforms
/// used by the samplers. All transforms are implemented here (not via
/// std::*_distribution) so that a given (seed, index) reproduces the same
/// variates on every platform.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_.next(); }

    /// Uniform on [0,1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_.next() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0,1), safe as a log argument.
    double uniform_open() {
        return (static_cast<double>(engine_.next() >> 12) + 0.5) * 0x1.0p-52;
    }

    /// Exponential with the given rate.
    double exponential(double rate) { return -std::log(uniform_open()) / rate; }

    /// Standard normal, Marsaglia polar method (second variate cached).
    double normal() {
        if (has_cache_) {
            has_cache_ = false;
            return cache_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        cache_ = v * m;
        has_cache_ = true;
        return u * m;
    }

    /// Gamma(shape, 1) for shape >= 1, Marsaglia-Tsang squeeze method.
    double gamma(double shape) {
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Sum of `count` i.i.d. Exponential(rate) variates. Grouped draws keep
    /// the cost O(1) per group instead of O(count).
    double exponential_sum(std::uint64_t count, double rate) {
        if (count == 1) return exponential(rate);
        return gamma(static_cast<double>(count)) / rate;
    }

private:
    Xoshiro256 engine_;
    double cache_ = 0.0;
    bool has_cache_ = false;
};

/// Seed material for sample `index` of a run with master seed `seed`.
/// Streams are independent of worker count and iteration order.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 sm(seed);
    const std::uint64_t base = sm.next();
    SplitMix64 mix(base ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    return mix.next();
}

inline RandomStream stream_for(std::uint64_t seed, std::uint64_t index) {
    return RandomStream(derive_stream_seed(seed, index));
}

}  // namespace fragarea

#endif  // FRAGAREA_RNG_HPP_

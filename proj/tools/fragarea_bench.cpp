// Timing harness comparing the serial reference sampling loops against the
// OpenMP batch drivers. Also checks that both produce bit-identical
// estimates, which is the reproducibility contract of the per-index
// streams.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fragarea/measures.hpp"
#include "fragarea/simulate.hpp"

namespace {

using fragarea::RandomStream;

double elapsed_of(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void bench(const std::string& name, std::uint64_t n,
           const std::function<double(RandomStream&)>& kernel) {
    std::vector<double> serial, parallel;
    const double ts = elapsed_of([&] { serial = fragarea::run_batch(n, 42, 1, kernel); });
    const double tp = elapsed_of([&] { parallel = fragarea::run_batch(n, 42, 0, kernel); });
    const bool identical = serial == parallel;
    std::printf("%-24s n=%-8llu serial %8.3fs (%9.0f/s)  omp %8.3fs (%9.0f/s)  speedup %.2fx  %s\n",
                name.c_str(), static_cast<unsigned long long>(n), ts, n / ts, tp, n / tp,
                ts / tp, identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("openmp enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("openmp disabled\n");
#endif

    const fragarea::FragmentationParams dyadic{
        fragarea::AtomicMeasure{{{0.5, 1.0}}}, -0.5};
    fragarea::SimConfig sc;
    sc.epsilon = 1e-6;
    const fragarea::RdeSampler rde(dyadic, sc);
    bench("rde dyadic e=1e-6", 20000, [&](RandomStream& rng) { return rde.sample(rng); });

    const fragarea::FragmentationParams brownian{fragarea::BrownianMeasure{}, -0.5};
    fragarea::SimConfig sct;
    sct.epsilon = 1e-3;
    const fragarea::FragmentationParams trunc{truncate(brownian.measure, 16), -0.5};
    const fragarea::RdeSampler rde_trunc(trunc, sct);
    bench("rde trunc-brownian n=16", 5000,
          [&](RandomStream& rng) { return rde_trunc.sample(rng); });

    bench("excursion 4096 steps", 5000,
          [](RandomStream& rng) { return fragarea::sample_excursion_area(4096, rng); });

    bench("homogeneous t_max=4", 5000, [&](RandomStream& rng) {
        return fragarea::simulate_homogeneous(dyadic, 1, 4.0, rng).area;
    });
    return 0;
}

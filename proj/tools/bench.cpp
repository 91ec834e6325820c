// Benchmark comparing the serial reference Monte Carlo engine against the
// OpenMP kernel at several thread counts, verifying bit-identical estimates.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "codedbatch/simulator.hpp"

using namespace codedbatch;

namespace {

template <typename F>
double timed(F&& fn, CompletionEstimate& out) {
    const auto t0 = std::chrono::steady_clock::now();
    out = fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    std::int64_t samples = argc > 1 ? std::atoll(argv[1]) : 200000;

    const SystemSpec spec(10, 112);
    const Policy policy(7, 2);
    const ServiceModel model = ShiftedExponential(1.0, 1.0);

    SimOptions opts;
    opts.samples = samples;
    opts.seed = 42;

    std::printf("workload: n=%lld j=%lld k=%lld b=%lld samples=%lld\n",
                static_cast<long long>(spec.n), static_cast<long long>(spec.j),
                static_cast<long long>(policy.k), static_cast<long long>(policy.b),
                static_cast<long long>(samples));

    CompletionEstimate ref;
    const double t_ref = timed(
        [&] { return simulate_ejct_reference(spec, policy, model, opts); }, ref);
    std::printf("%-14s %10.1f ms   mean=%.12g std_err=%.6g\n", "serial ref", t_ref, ref.mean,
                ref.std_err);

    int max_threads = 1;
#ifdef _OPENMP
    max_threads = omp_get_max_threads();
#endif
    std::vector<int> thread_counts = {1, 2, 4};
    if (max_threads > 4) thread_counts.push_back(max_threads);

    bool all_equal = true;
    for (int nt : thread_counts) {
        SimOptions par = opts;
        par.threads = nt;
        CompletionEstimate est;
        const double t = timed([&] { return simulate_ejct(spec, policy, model, par); }, est);
        const bool equal = est.mean == ref.mean && est.std_err == ref.std_err;
        all_equal = all_equal && equal;
        std::printf("omp %2d thread %10.1f ms   speedup=%.2fx   %s\n", nt, t, t_ref / t,
                    equal ? "bit-identical" : "MISMATCH");
    }
    if (!all_equal) {
        std::printf("FAIL: parallel results differ from the serial reference\n");
        return 1;
    }
    return 0;
}

#pragma once

#include <cstdint>
#include <random>
#include <variant>

// Per-CU service-time laws and their additive scaling to batch tasks.
// Models are immutable values, safe to share across threads; random streams
// are owned by the caller and never shared.

namespace codedbatch {

// X = delta + Exp(mean w): deterministic floor plus exponential straggle.
struct ShiftedExponential {
    double delta;  // time per CU, >= 0
    double w;      // time per CU, > 0
    ShiftedExponential(double delta, double w);
};

// X = t_fast with probability 1-eps, t_slow with probability eps.
struct BiModal {
    double t_fast;  // > 0
    double t_slow;  // >= t_fast
    double eps;     // straggling probability in [0,1]
    BiModal(double t_fast, double t_slow, double eps);
};

using ServiceModel = std::variant<ShiftedExponential, BiModal>;

// Batch task time: sum of b independent per-CU draws.
struct BatchTaskLaw {
    ServiceModel model;
    std::int64_t b;
    BatchTaskLaw(ServiceModel model, std::int64_t b);
};

using Rng = std::mt19937_64;

// One 53-bit draw in [0,1) from the raw engine word; fully specified so
// results are reproducible across standard libraries.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double sample_cu(const ServiceModel& model, Rng& rng);
// Consumes exactly b successive per-CU draws from the stream.
double sample_batch(const BatchTaskLaw& law, Rng& rng);

// Exact CDF of the batch task time. Shifted exponential batches are shifted
// Erlang; bi-modal batches are discrete with b+1 support points.
double batch_cdf(const BatchTaskLaw& law, double y);
double batch_mean(const BatchTaskLaw& law);

inline bool is_shifted_exponential(const ServiceModel& m) {
    return std::holds_alternative<ShiftedExponential>(m);
}
inline bool is_bimodal(const ServiceModel& m) { return std::holds_alternative<BiModal>(m); }

}  // namespace codedbatch

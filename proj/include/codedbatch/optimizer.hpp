#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "codedbatch/simulator.hpp"

// Enumerates feasible (k, b) policies and minimizes expected completion
// time: batch-size optimization at fixed code rate, joint (k, b)
// optimization, and the three-strategy recommender. Candidate evaluations
// are independent and run in parallel; report ordering and tie-breaking are
// parallelism-independent.

namespace codedbatch {

// All divisors of s, ascending.
std::vector<std::int64_t> feasible_batches(std::int64_t s);
// All k in [1, n] dividing the job size, ascending.
std::vector<std::int64_t> feasible_k(const SystemSpec& spec);

struct PolicyEval {
    Policy policy{1, 1};
    CompletionEstimate estimate;
};

struct OptimizationReport {
    Policy best_policy{1, 1};
    double best_value = 0.0;
    std::vector<PolicyEval> table;  // exactly the feasible candidate set, in order
    Method estimator = Method::quadrature;
    bool restricted = false;
    // Monte Carlo only: true when the winner does not beat every other
    // candidate by more than 3x the combined standard error.
    bool inconclusive = false;
    std::string note;
};

// Single-policy evaluation with the given estimator (shared by the
// optimizers, the sweep runner and the CLI).
CompletionEstimate evaluate_policy(const SystemSpec& spec, const ServiceModel& model,
                                   const Policy& policy, Method estimator,
                                   const SimOptions& opts = {});

// argmin over b | s at fixed k; candidates are all divisors of s, or just
// {1, s} when restricted. Ties break toward smaller b.
OptimizationReport optimize_batch(const SystemSpec& spec, const ServiceModel& model,
                                  std::int64_t k, Method estimator, bool restricted = false,
                                  const SimOptions& opts = {});

// argmin over every feasible (k, b); ties break toward smaller k, then
// smaller b.
OptimizationReport optimize_joint(const SystemSpec& spec, const ServiceModel& model,
                                  Method estimator, const SimOptions& opts = {});

enum class Strategy { replication_b1, splitting_bmax, coding_b1 };
const char* strategy_name(Strategy s);

struct StrategyValue {
    Strategy strategy;
    bool feasible = false;
    Policy policy{1, 1};
    double value = 0.0;  // meaningful only when feasible
};

struct Recommendation {
    Strategy winner;
    double w_over_delta;  // infinity when delta = 0
    double l;
    std::array<StrategyValue, 3> strategies;  // replication, splitting, coding
};

// Evaluates exactly three canonical strategies: (k=1, b=1), (k=n, b=s), and
// the best (k, b=1) over interior k. Shifted-exponential models only; the
// asymptotic estimator is rejected because the splitting arm sits at r=1.
Recommendation recommend_strategy(const SystemSpec& spec, const ServiceModel& model,
                                  Method estimator = Method::quadrature,
                                  const SimOptions& opts = {});

}  // namespace codedbatch

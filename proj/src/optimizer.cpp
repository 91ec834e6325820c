#include "codedbatch/optimizer.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>

#include "codedbatch/analytic.hpp"

namespace codedbatch {

std::vector<std::int64_t> feasible_batches(std::int64_t s) {
    if (s < 1) throw std::invalid_argument("feasible_batches: s must be >= 1");
    std::vector<std::int64_t> out;
    for (std::int64_t d = 1; d <= s; ++d)
        if (s % d == 0) out.push_back(d);
    return out;
}

std::vector<std::int64_t> feasible_k(const SystemSpec& spec) {
    std::vector<std::int64_t> out;
    for (std::int64_t k = 1; k <= spec.n; ++k)
        if (spec.j % k == 0) out.push_back(k);
    return out;
}

CompletionEstimate evaluate_policy(const SystemSpec& spec, const ServiceModel& model,
                                   const Policy& policy, Method estimator,
                                   const SimOptions& opts) {
    const PolicyDims dims = policy_dims(spec, policy);
    CompletionEstimate est;
    est.method = estimator;
    switch (estimator) {
        case Method::monte_carlo:
            return simulate_ejct(spec, policy, model, opts);
        case Method::quadrature:
            est.mean = quadrature_ejct(model, spec.n, policy.k, policy.b, dims.g);
            return est;
        case Method::asymptotic:
            est.mean = asymptotic_ejct(model, spec.l(), dims.r, policy.b).expected_time;
            return est;
        case Method::exact:
            est.mean = exact_bimodal_ejct(model, spec.n, policy.k, policy.b, dims.g);
            return est;
    }
    throw std::invalid_argument("evaluate_policy: unknown estimator");
}

namespace {

// Evaluates all candidates (in parallel) and reduces in candidate order so
// the argmin and tie-breaking do not depend on thread count.
OptimizationReport run_candidates(const SystemSpec& spec, const ServiceModel& model,
                                  std::vector<Policy> candidates, Method estimator,
                                  bool restricted, const SimOptions& opts) {
    OptimizationReport report;
    report.estimator = estimator;
    report.restricted = restricted;
    report.table.resize(candidates.size());

    std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(candidates.size()); ++i) {
        try {
            report.table[i] = {candidates[i],
                               evaluate_policy(spec, model, candidates[i], estimator, opts)};
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    std::size_t best = 0;
    for (std::size_t i = 1; i < report.table.size(); ++i)
        if (report.table[i].estimate.mean < report.table[best].estimate.mean) best = i;
    report.best_policy = report.table[best].policy;
    report.best_value = report.table[best].estimate.mean;

    if (estimator == Method::monte_carlo) {
        for (std::size_t i = 0; i < report.table.size(); ++i) {
            if (i == best) continue;
            const auto& w = report.table[best].estimate;
            const auto& o = report.table[i].estimate;
            const double gap = o.mean - w.mean;
            const double combined =
                std::sqrt(w.std_err * w.std_err + o.std_err * o.std_err);
            if (gap <= 3.0 * combined) {
                report.inconclusive = true;
                report.note =
                    "winner does not beat all candidates by >3x combined std_err; "
                    "increase samples";
                break;
            }
        }
    }
    return report;
}

}  // namespace

OptimizationReport optimize_batch(const SystemSpec& spec, const ServiceModel& model,
                                  std::int64_t k, Method estimator, bool restricted,
                                  const SimOptions& opts) {
    if (spec.j % k != 0 || k < 1 || k > spec.n)
        throw std::invalid_argument("optimize_batch: infeasible k=" + std::to_string(k) +
                                    " for n=" + std::to_string(spec.n) +
                                    ", j=" + std::to_string(spec.j));
    const std::int64_t s = spec.j / k;
    std::vector<Policy> candidates;
    if (restricted) {
        candidates.emplace_back(k, 1);
        if (s != 1) candidates.emplace_back(k, s);
    } else {
        for (std::int64_t b : feasible_batches(s)) candidates.emplace_back(k, b);
    }
    return run_candidates(spec, model, std::move(candidates), estimator, restricted, opts);
}

OptimizationReport optimize_joint(const SystemSpec& spec, const ServiceModel& model,
                                  Method estimator, const SimOptions& opts) {
    std::vector<Policy> candidates;
    for (std::int64_t k : feasible_k(spec))
        for (std::int64_t b : feasible_batches(spec.j / k)) candidates.emplace_back(k, b);
    return run_candidates(spec, model, std::move(candidates), estimator, false, opts);
}

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::replication_b1: return "replication_b1";
        case Strategy::splitting_bmax: return "splitting_bmax";
        default: return "coding_b1";
    }
}

Recommendation recommend_strategy(const SystemSpec& spec, const ServiceModel& model,
                                  Method estimator, const SimOptions& opts) {
    const auto* se = std::get_if<ShiftedExponential>(&model);
    if (!se)
        throw std::invalid_argument(
            "recommend_strategy is defined for shifted-exponential models; use optimize_joint "
            "for bi-modal");
    if (estimator == Method::asymptotic)
        throw std::invalid_argument(
            "recommend_strategy: asymptotic estimator undefined for the splitting arm (r=1); "
            "use quadrature or monte_carlo");

    Recommendation rec;
    rec.l = spec.l();
    rec.w_over_delta =
        se->delta > 0.0 ? se->w / se->delta : std::numeric_limits<double>::infinity();

    auto& replication = rec.strategies[0];
    auto& splitting = rec.strategies[1];
    auto& coding = rec.strategies[2];
    replication.strategy = Strategy::replication_b1;
    splitting.strategy = Strategy::splitting_bmax;
    coding.strategy = Strategy::coding_b1;

    replication.feasible = true;  // k=1 divides any job, b=1 divides any task
    replication.policy = Policy(1, 1);
    replication.value = evaluate_policy(spec, model, replication.policy, estimator, opts).mean;

    if (spec.j % spec.n == 0) {
        splitting.feasible = true;
        splitting.policy = Policy(spec.n, spec.j / spec.n);
        splitting.value = evaluate_policy(spec, model, splitting.policy, estimator, opts).mean;
    }

    for (std::int64_t k : feasible_k(spec)) {
        if (k == 1 || k == spec.n) continue;
        const double v = evaluate_policy(spec, model, Policy(k, 1), estimator, opts).mean;
        if (!coding.feasible || v < coding.value) {
            coding.feasible = true;
            coding.policy = Policy(k, 1);
            coding.value = v;
        }
    }

    const StrategyValue* winner = nullptr;
    for (const auto& sv : rec.strategies) {
        if (!sv.feasible) continue;
        if (!winner || sv.value < winner->value) winner = &sv;
    }
    if (!winner) throw std::invalid_argument("recommend_strategy: no feasible strategy");
    rec.winner = winner->strategy;
    return rec;
}

}  // namespace codedbatch

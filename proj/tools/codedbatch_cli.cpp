// codedbatch: estimate and optimize expected job completion time for
// MDS-coded batched execution. Exit codes: 0 success, 1 validation error,
// 2 numerical failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "codedbatch/analytic.hpp"
#include "codedbatch/errors.hpp"
#include "codedbatch/experiments.hpp"
#include "codedbatch/optimizer.hpp"
#include "codedbatch/service_model.hpp"
#include "codedbatch/simulator.hpp"

namespace {

using namespace codedbatch;

struct ModelFlags {
    std::string type = "shifted_exponential";
    double delta = 1.0;
    double w = 1.0;
    double t_fast = 1.0;
    double t_slow = 5.0;
    double eps = 0.1;
};

void add_model_flags(CLI::App* cmd, ModelFlags& mf) {
    cmd->add_option("--model", mf.type, "service model: shifted_exponential|bimodal")
        ->capture_default_str();
    cmd->add_option("--delta", mf.delta, "per-CU floor time (shifted exponential)")
        ->capture_default_str();
    cmd->add_option("--w", mf.w, "per-CU exponential mean (shifted exponential)")
        ->capture_default_str();
    cmd->add_option("--t-fast", mf.t_fast, "fast per-CU time (bimodal)")->capture_default_str();
    cmd->add_option("--t-slow", mf.t_slow, "slow per-CU time (bimodal)")->capture_default_str();
    cmd->add_option("--eps", mf.eps, "straggling probability (bimodal)")->capture_default_str();
}

ServiceModel build_model(const ModelFlags& mf) {
    if (mf.type == "shifted_exponential") return ShiftedExponential(mf.delta, mf.w);
    if (mf.type == "bimodal") return BiModal(mf.t_fast, mf.t_slow, mf.eps);
    throw std::invalid_argument("unknown model '" + mf.type +
                                "' (shifted_exponential|bimodal)");
}

struct OutFlags {
    std::string path;
    std::string format = "csv";
};

void add_out_flags(CLI::App* cmd, OutFlags& of) {
    cmd->add_option("--out", of.path, "write records to this file");
    cmd->add_option("--format", of.format, "output format: csv|json")->capture_default_str();
}

OutputSpec out_spec(const OutFlags& of) {
    OutputSpec spec;
    spec.path = of.path;
    if (of.format == "csv")
        spec.format = OutputFormat::csv;
    else if (of.format == "json")
        spec.format = OutputFormat::json;
    else
        throw std::invalid_argument("unknown output format '" + of.format + "' (csv|json)");
    return spec;
}

void emit_records(const std::vector<SweepRecord>& records, const OutFlags& of) {
    if (!of.path.empty()) {
        write_records(records, out_spec(of));
        std::cout << records.size() << " records written to " << of.path << "\n";
    } else if (of.format == "json") {
        std::cout << records_to_json(records);
    } else {
        std::cout << records_to_csv(records);
    }
}

void print_estimate(const SystemSpec& spec, const Policy& policy, const CompletionEstimate& est) {
    const PolicyDims dims = policy_dims(spec, policy);
    std::printf("n=%lld j=%lld l=%.10g | k=%lld r=%.10g s=%lld b=%lld g=%lld\n",
                static_cast<long long>(spec.n), static_cast<long long>(spec.j), spec.l(),
                static_cast<long long>(policy.k), dims.r, static_cast<long long>(dims.s),
                static_cast<long long>(policy.b), static_cast<long long>(dims.g));
    std::printf("method: %s\nmean: %.10g\n", method_name(est.method), est.mean);
    if (est.method == Method::monte_carlo)
        std::printf("std_err: %.10g\nsamples: %lld\n", est.std_err,
                    static_cast<long long>(est.samples));
}

void print_report(const SystemSpec& spec, const OptimizationReport& report) {
    std::printf("%-6s %-6s %-6s %-14s %-12s\n", "k", "b", "g", "mean", "std_err");
    for (const auto& row : report.table) {
        const PolicyDims dims = policy_dims(spec, row.policy);
        std::printf("%-6lld %-6lld %-6lld %-14.8g %-12.6g\n",
                    static_cast<long long>(row.policy.k), static_cast<long long>(row.policy.b),
                    static_cast<long long>(dims.g), row.estimate.mean, row.estimate.std_err);
    }
    std::printf("best: k=%lld b=%lld mean=%.10g estimator=%s%s\n",
                static_cast<long long>(report.best_policy.k),
                static_cast<long long>(report.best_policy.b), report.best_value,
                method_name(report.estimator), report.restricted ? " (restricted)" : "");
    if (report.inconclusive) std::printf("inconclusive: %s\n", report.note.c_str());
}

std::vector<SweepRecord> report_records(const std::string& scenario_id, const SystemSpec& spec,
                                        const ServiceModel& model,
                                        const OptimizationReport& report,
                                        const SimOptions& opts) {
    std::vector<SweepRecord> records;
    records.reserve(report.table.size());
    for (const auto& row : report.table)
        records.push_back(
            make_sweep_record(scenario_id, spec, model, row.policy, row.estimate, opts));
    return records;
}

// Deterministic sample-path battery for the min-superadditivity and
// max-subadditivity checks: random matrices, every divisor grouping.
int run_check(std::uint64_t seed, int trials) {
    Rng rng(seed);
    const ShiftedExponential se(0.3, 1.0);
    std::int64_t groupings = 0;
    std::int64_t violations = 0;
    for (int t = 0; t < trials; ++t) {
        const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 8);
        const std::int64_t s = 1 + static_cast<std::int64_t>(rng() % 12);
        CuMatrix cu(n, s);
        const bool exponential_entries = (t % 2) == 1;
        for (auto& v : cu.data)
            v = exponential_entries ? sample_cu(ServiceModel(se), rng) : 2.0 * uniform01(rng);
        for (std::int64_t d = 1; d <= s; ++d) {
            if (s % d != 0) continue;
            const std::vector<std::int64_t> blocks(static_cast<std::size_t>(s / d), d);
            ++groupings;
            const PathCheck mn = check_min_superadditivity(cu, blocks);
            const PathCheck mx = check_max_subadditivity(cu, blocks);
            if (!mn.holds || !mx.holds) {
                ++violations;
                std::printf("violation at trial %d (n=%lld s=%lld d=%lld): min %.17g vs %.17g, "
                            "max %.17g vs %.17g\n",
                            t, static_cast<long long>(n), static_cast<long long>(s),
                            static_cast<long long>(d), mn.lhs, mn.rhs, mx.lhs, mx.rhs);
            }
        }
    }
    std::printf("%s: %d matrices, %lld groupings, %lld violations\n",
                violations == 0 ? "PASS" : "FAIL", trials, static_cast<long long>(groupings),
                static_cast<long long>(violations));
    return violations == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulate and optimize batched MDS-coded distributed computing"};
    app.require_subcommand(1);

    std::int64_t n = 10, j = 60, k = 1, b = 1;
    std::int64_t samples = 100000;
    std::uint64_t seed = 42;
    std::string estimator = "quadrature";
    int trials = 1000;
    ModelFlags mf;
    OutFlags of;
    std::string config_path, preset_name;
    bool restricted = false;

    auto add_system = [&](CLI::App* cmd) {
        cmd->add_option("--n", n, "worker count")->capture_default_str();
        cmd->add_option("--job-size", j, "job size in CUs")->capture_default_str();
    };
    auto add_sim = [&](CLI::App* cmd) {
        cmd->add_option("--samples", samples, "Monte Carlo replications")->capture_default_str();
        cmd->add_option("--seed", seed, "master RNG seed")->capture_default_str();
    };

    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate for one policy");
    add_system(sim_cmd);
    sim_cmd->add_option("--k", k, "redundancy parameter")->capture_default_str();
    sim_cmd->add_option("--b", b, "batch size in CUs")->capture_default_str();
    add_model_flags(sim_cmd, mf);
    add_sim(sim_cmd);
    add_out_flags(sim_cmd, of);

    auto* ana_cmd = app.add_subcommand("analytic", "large-n closed-form estimate (SE only)");
    add_system(ana_cmd);
    ana_cmd->add_option("--k", k, "redundancy parameter")->capture_default_str();
    ana_cmd->add_option("--b", b, "batch size in CUs")->capture_default_str();
    ana_cmd->add_option("--delta", mf.delta, "per-CU floor time")->capture_default_str();
    ana_cmd->add_option("--w", mf.w, "per-CU exponential mean")->capture_default_str();

    auto* quad_cmd = app.add_subcommand("quadrature", "exact finite-n estimate (SE only)");
    add_system(quad_cmd);
    quad_cmd->add_option("--k", k, "redundancy parameter")->capture_default_str();
    quad_cmd->add_option("--b", b, "batch size in CUs")->capture_default_str();
    add_model_flags(quad_cmd, mf);
    add_out_flags(quad_cmd, of);

    auto* ob_cmd = app.add_subcommand("optimize-batch", "argmin over b at fixed k");
    add_system(ob_cmd);
    ob_cmd->add_option("--k", k, "redundancy parameter")->required();
    add_model_flags(ob_cmd, mf);
    ob_cmd->add_option("--estimator", estimator, "monte_carlo|quadrature|asymptotic|exact")
        ->capture_default_str();
    ob_cmd->add_flag("--restricted", restricted, "evaluate only b in {1, s}");
    add_sim(ob_cmd);
    add_out_flags(ob_cmd, of);

    auto* oj_cmd = app.add_subcommand("optimize-joint", "argmin over every feasible (k, b)");
    add_system(oj_cmd);
    add_model_flags(oj_cmd, mf);
    oj_cmd->add_option("--estimator", estimator, "monte_carlo|quadrature|asymptotic|exact")
        ->capture_default_str();
    add_sim(oj_cmd);
    add_out_flags(oj_cmd, of);

    auto* rec_cmd = app.add_subcommand("recommend",
                                       "compare replication/splitting/coding strategies (SE)");
    add_system(rec_cmd);
    add_model_flags(rec_cmd, mf);
    rec_cmd->add_option("--estimator", estimator, "monte_carlo|quadrature")
        ->capture_default_str();
    add_sim(rec_cmd);

    auto* sweep_cmd = app.add_subcommand("sweep", "run a JSON experiment config");
    sweep_cmd->add_option("config", config_path, "path to config JSON")->required();
    add_out_flags(sweep_cmd, of);

    auto* preset_cmd = app.add_subcommand("preset", "run a named experiment scenario");
    preset_cmd->add_option("name", preset_name,
                           "fig2a|fig2b|fig2c|fig3a|fig3b|fig3c|fig3d|table_rprime")
        ->required();
    add_out_flags(preset_cmd, of);

    auto* check_cmd = app.add_subcommand("check", "run sample-path property batteries");
    check_cmd->add_option("--seed", seed, "battery RNG seed")->capture_default_str();
    check_cmd->add_option("--trials", trials, "number of random matrices")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const SimOptions opts{samples, seed, 0};
        if (sim_cmd->parsed()) {
            const SystemSpec spec(n, j);
            const Policy policy(k, b);
            const ServiceModel model = build_model(mf);
            const CompletionEstimate est = simulate_ejct(spec, policy, model, opts);
            print_estimate(spec, policy, est);
            if (!of.path.empty())
                emit_records({make_sweep_record("cli", spec, model, policy, est, opts)}, of);
        } else if (ana_cmd->parsed()) {
            const SystemSpec spec(n, j);
            const double r = static_cast<double>(k) / static_cast<double>(n);
            const AsymptoticResult res =
                asymptotic_ejct(ShiftedExponential(mf.delta, mf.w), spec.l(), r, b);
            std::printf("expected_time: %.10g\nm: %.10g\nf: %.10g\n", res.expected_time, res.m,
                        res.f_value);
        } else if (quad_cmd->parsed()) {
            const SystemSpec spec(n, j);
            const Policy policy(k, b);
            const ServiceModel model = build_model(mf);
            const CompletionEstimate est = evaluate_policy(spec, model, policy,
                                                           Method::quadrature, opts);
            print_estimate(spec, policy, est);
            if (!of.path.empty())
                emit_records({make_sweep_record("cli", spec, model, policy, est, opts)}, of);
        } else if (ob_cmd->parsed()) {
            const SystemSpec spec(n, j);
            const ServiceModel model = build_model(mf);
            const auto report = optimize_batch(spec, model, k, method_from_name(estimator),
                                               restricted, opts);
            print_report(spec, report);
            if (!of.path.empty())
                emit_records(report_records("optimize-batch", spec, model, report, opts), of);
        } else if (oj_cmd->parsed()) {
            const SystemSpec spec(n, j);
            const ServiceModel model = build_model(mf);
            const auto report = optimize_joint(spec, model, method_from_name(estimator), opts);
            print_report(spec, report);
            if (!of.path.empty())
                emit_records(report_records("optimize-joint", spec, model, report, opts), of);
        } else if (rec_cmd->parsed()) {
            const SystemSpec spec(n, j);
            const ServiceModel model = build_model(mf);
            const Recommendation rec =
                recommend_strategy(spec, model, method_from_name(estimator), opts);
            std::printf("l: %.10g\nw_over_delta: %.10g\n", rec.l, rec.w_over_delta);
            for (const auto& sv : rec.strategies) {
                if (sv.feasible)
                    std::printf("%-16s k=%-4lld b=%-4lld value=%.10g\n",
                                strategy_name(sv.strategy), static_cast<long long>(sv.policy.k),
                                static_cast<long long>(sv.policy.b), sv.value);
                else
                    std::printf("%-16s infeasible\n", strategy_name(sv.strategy));
            }
            std::printf("winner: %s\n", strategy_name(rec.winner));
        } else if (sweep_cmd->parsed()) {
            const ExperimentConfig config = load_config(config_path);
            const std::vector<SweepRecord> records = run_experiment(config);
            if (config.output && of.path.empty()) {
                write_records(records, *config.output);
                std::cout << records.size() << " records written to " << config.output->path
                          << "\n";
            } else {
                emit_records(records, of);
            }
        } else if (preset_cmd->parsed()) {
            const PresetResult result = run_preset(preset_name);
            if (!result.records.empty()) emit_records(result.records, of);
            for (const auto& v : result.verdicts) std::cout << v << "\n";
        } else if (check_cmd->parsed()) {
            return run_check(seed, trials);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

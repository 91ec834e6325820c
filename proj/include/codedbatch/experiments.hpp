#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "codedbatch/optimizer.hpp"
#include "codedbatch/simulator.hpp"

// Experiment configuration, sweep runner, preset scenarios and plot-ready
// CSV/JSON emission.

namespace codedbatch {

// One (policy, estimator) evaluation row.
struct SweepRecord {
    std::string scenario_id;
    std::int64_t n = 0;
    std::int64_t j = 0;
    double l = 0.0;
    std::int64_t k = 0;
    double r = 0.0;
    std::int64_t b = 0;
    std::int64_t g = 0;
    std::string model_type;
    std::string model_params;  // compact JSON, e.g. {"delta":1,"w":1}
    std::string estimator;
    double mean = 0.0;
    double std_err = 0.0;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;

    bool operator==(const SweepRecord&) const = default;
};

enum class OutputFormat { csv, json };

struct OutputSpec {
    OutputFormat format = OutputFormat::csv;
    std::string path;
};

struct ExperimentConfig {
    SystemSpec system{1, 1};
    ServiceModel model{ShiftedExponential(0.0, 1.0)};
    std::vector<Policy> policies;  // expanded, each feasible
    std::vector<Method> estimators;
    SimOptions sim;
    std::optional<OutputSpec> output;
    std::string scenario_id;
};

// Strict parse of the JSON config document; unknown keys are rejected with
// their key path, infeasible policies with the divisibility constraint that
// failed.
ExperimentConfig parse_config_text(const std::string& text, const std::string& scenario_id);
ExperimentConfig load_config(const std::string& path);

// Evaluates every (policy, estimator) cell of an expanded config.
std::vector<SweepRecord> run_experiment(const ExperimentConfig& config);

// load_config + run_experiment + atomic output write.
std::vector<SweepRecord> run_config(const std::string& path);

// One evaluation row in SweepRecord form.
SweepRecord make_sweep_record(const std::string& scenario_id, const SystemSpec& spec,
                              const ServiceModel& model, const Policy& policy,
                              const CompletionEstimate& estimate, const SimOptions& opts);

// Model <-> config JSON ({"type":"shifted_exponential","delta":..,"w":..} or
// {"type":"bimodal","t_fast":..,"t_slow":..,"eps":..}).
ServiceModel model_from_json_text(const std::string& text);
std::string model_type_name(const ServiceModel& model);
std::string model_params_json(const ServiceModel& model);

// Fixed header row in SweepRecord field order, RFC 4180 quoting, '.' decimal
// separator, full double precision.
std::string records_to_csv(const std::vector<SweepRecord>& records);
std::vector<SweepRecord> records_from_csv(const std::string& text);
std::string records_to_json(const std::vector<SweepRecord>& records);

// Writes via a temp file + rename in the target directory.
void write_file_atomic(const std::string& path, const std::string& contents);
void write_records(const std::vector<SweepRecord>& records, const OutputSpec& output);

struct PresetResult {
    std::vector<SweepRecord> records;
    std::vector<std::string> verdicts;  // one line per optimized scenario
};

// Named experiment scenarios (fig2a..fig2c batch sweeps, fig3a..fig3d joint
// sweeps, table_rprime threshold printout).
PresetResult run_preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace codedbatch

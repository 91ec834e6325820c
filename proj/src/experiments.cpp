#include "codedbatch/experiments.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"

#include "codedbatch/analytic.hpp"

namespace codedbatch {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config: " + path + ": " + what);
}

void require_keys(const json& obj, const std::string& path,
                  const std::vector<std::string>& required,
                  const std::vector<std::string>& optional = {}) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& key : required)
        if (!obj.contains(key)) fail(path, "missing required key '" + key + "'");
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const auto& r : required) known = known || key == r;
        for (const auto& o : optional) known = known || key == o;
        if (!known) fail(path + "." + key, "unknown key");
    }
}

std::int64_t get_int(const json& obj, const std::string& path, const std::string& key) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<std::int64_t>();
}

double get_num(const json& obj, const std::string& path, const std::string& key) {
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

ServiceModel parse_model(const json& m, const std::string& path) {
    if (!m.is_object() || !m.contains("type")) fail(path, "model needs a 'type' key");
    const std::string type = m.at("type").is_string() ? m.at("type").get<std::string>() : "";
    try {
        if (type == "shifted_exponential") {
            require_keys(m, path, {"type", "delta", "w"});
            return ShiftedExponential(get_num(m, path, "delta"), get_num(m, path, "w"));
        }
        if (type == "bimodal") {
            require_keys(m, path, {"type", "t_fast", "t_slow", "eps"});
            return BiModal(get_num(m, path, "t_fast"), get_num(m, path, "t_slow"),
                           get_num(m, path, "eps"));
        }
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    fail(path + ".type", "unknown model type '" + type +
                             "' (shifted_exponential|bimodal)");
}

std::vector<std::int64_t> parse_int_or_all(const json& v, const std::string& path) {
    if (v.is_string()) {
        if (v.get<std::string>() == "all_feasible") return {};  // empty marks all_feasible
        fail(path, "expected \"all_feasible\" or an array of integers");
    }
    if (!v.is_array() || v.empty()) fail(path, "expected \"all_feasible\" or a non-empty array");
    std::vector<std::int64_t> out;
    for (const auto& e : v) {
        if (!e.is_number_integer()) fail(path, "expected integers");
        out.push_back(e.get<std::int64_t>());
    }
    return out;
}

std::vector<Policy> expand_policies(const json& p, const SystemSpec& spec,
                                    const std::string& path) {
    std::vector<Policy> out;
    if (p.is_array()) {
        if (p.empty()) fail(path, "policy list must be non-empty");
        for (std::size_t i = 0; i < p.size(); ++i) {
            const std::string ipath = path + "[" + std::to_string(i) + "]";
            require_keys(p[i], ipath, {"k", "b"});
            Policy pol(get_int(p[i], ipath, "k"), get_int(p[i], ipath, "b"));
            try {
                policy_dims(spec, pol);
            } catch (const std::invalid_argument& e) {
                fail(ipath, e.what());
            }
            out.push_back(pol);
        }
        return out;
    }
    if (!p.is_object()) fail(path, "expected a policy array or a {k, b} sweep object");
    require_keys(p, path, {"k", "b"});
    std::vector<std::int64_t> ks = parse_int_or_all(p.at("k"), path + ".k");
    const std::vector<std::int64_t> bs = parse_int_or_all(p.at("b"), path + ".b");
    if (ks.empty()) ks = feasible_k(spec);
    for (std::int64_t k : ks) {
        if (k < 1 || k > spec.n || spec.j % k != 0)
            fail(path + ".k", "k=" + std::to_string(k) + " infeasible: requires 1 <= k <= n=" +
                                  std::to_string(spec.n) + " and k | j=" +
                                  std::to_string(spec.j));
        const std::int64_t s = spec.j / k;
        const std::vector<std::int64_t> kbs = bs.empty() ? feasible_batches(s) : bs;
        for (std::int64_t b : kbs) {
            if (b < 1 || s % b != 0)
                fail(path + ".b", "b=" + std::to_string(b) +
                                      " infeasible for k=" + std::to_string(k) + ": requires b | s=" +
                                      std::to_string(s));
            out.emplace_back(k, b);
        }
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

const char* kCsvHeader =
    "scenario_id,n,j,l,k,r,b,g,model_type,model_params,estimator,mean,std_err,samples,seed";

std::vector<std::vector<std::string>> parse_csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && field.empty() && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            field_started = false;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            row.push_back(std::move(field));
            field.clear();
            field_started = false;
            rows.push_back(std::move(row));
            row.clear();
        } else {
            field += c;
            field_started = true;
        }
    }
    if (field_started || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::int64_t to_int(const std::string& s) { return std::strtoll(s.c_str(), nullptr, 10); }
std::uint64_t to_uint(const std::string& s) { return std::strtoull(s.c_str(), nullptr, 10); }
double to_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

SweepRecord make_record(const std::string& scenario_id, const SystemSpec& spec,
                        const ServiceModel& model, const PolicyEval& eval,
                        const SimOptions& opts) {
    return make_sweep_record(scenario_id, spec, model, eval.policy, eval.estimate, opts);
}

}  // namespace

SweepRecord make_sweep_record(const std::string& scenario_id, const SystemSpec& spec,
                              const ServiceModel& model, const Policy& policy,
                              const CompletionEstimate& estimate, const SimOptions& opts) {
    const PolicyDims dims = policy_dims(spec, policy);
    SweepRecord rec;
    rec.scenario_id = scenario_id;
    rec.n = spec.n;
    rec.j = spec.j;
    rec.l = spec.l();
    rec.k = policy.k;
    rec.r = dims.r;
    rec.b = policy.b;
    rec.g = dims.g;
    rec.model_type = model_type_name(model);
    rec.model_params = model_params_json(model);
    rec.estimator = method_name(estimate.method);
    rec.mean = estimate.mean;
    rec.std_err = estimate.std_err;
    rec.samples = estimate.samples;
    rec.seed = opts.seed;
    return rec;
}

ServiceModel model_from_json_text(const std::string& text) {
    json m;
    try {
        m = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("model: invalid JSON: ") + e.what());
    }
    return parse_model(m, "model");
}

std::string model_type_name(const ServiceModel& model) {
    return is_shifted_exponential(model) ? "shifted_exponential" : "bimodal";
}

std::string model_params_json(const ServiceModel& model) {
    if (const auto* se = std::get_if<ShiftedExponential>(&model))
        return "{\"delta\":" + format_double(se->delta) + ",\"w\":" + format_double(se->w) + "}";
    const auto& bm = std::get<BiModal>(model);
    return "{\"t_fast\":" + format_double(bm.t_fast) + ",\"t_slow\":" + format_double(bm.t_slow) +
           ",\"eps\":" + format_double(bm.eps) + "}";
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& scenario_id) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    require_keys(root, "config", {"system", "model", "policies", "estimators"},
                 {"sim", "output"});

    const auto& sys = root.at("system");
    require_keys(sys, "system", {"n", "j"});
    SystemSpec spec(get_int(sys, "system", "n"), get_int(sys, "system", "j"));

    ExperimentConfig config{spec, parse_model(root.at("model"), "model"), {}, {}, {}, {},
                            scenario_id};
    config.policies = expand_policies(root.at("policies"), spec, "policies");

    const auto& est = root.at("estimators");
    if (!est.is_array() || est.empty()) fail("estimators", "expected a non-empty array");
    for (std::size_t i = 0; i < est.size(); ++i) {
        if (!est[i].is_string()) fail("estimators[" + std::to_string(i) + "]", "expected a string");
        try {
            config.estimators.push_back(method_from_name(est[i].get<std::string>()));
        } catch (const std::invalid_argument& e) {
            fail("estimators[" + std::to_string(i) + "]", e.what());
        }
    }

    if (root.contains("sim")) {
        const auto& sim = root.at("sim");
        require_keys(sim, "sim", {}, {"samples", "seed"});
        if (sim.contains("samples")) {
            config.sim.samples = get_int(sim, "sim", "samples");
            if (config.sim.samples < 1) fail("sim.samples", "must be >= 1");
        }
        if (sim.contains("seed")) {
            if (!sim.at("seed").is_number_integer()) fail("sim.seed", "expected an integer");
            config.sim.seed = sim.at("seed").get<std::uint64_t>();
        }
    }

    if (root.contains("output")) {
        const auto& out = root.at("output");
        require_keys(out, "output", {"format", "path"});
        if (!out.at("format").is_string()) fail("output.format", "expected \"csv\" or \"json\"");
        const std::string fmt = out.at("format").get<std::string>();
        OutputSpec spec_out;
        if (fmt == "csv")
            spec_out.format = OutputFormat::csv;
        else if (fmt == "json")
            spec_out.format = OutputFormat::json;
        else
            fail("output.format", "unknown format '" + fmt + "' (csv|json)");
        if (!out.at("path").is_string() || out.at("path").get<std::string>().empty())
            fail("output.path", "expected a non-empty string");
        spec_out.path = out.at("path").get<std::string>();
        config.output = spec_out;
    }
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("config: cannot read '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text, std::filesystem::path(path).stem().string());
}

std::vector<SweepRecord> run_experiment(const ExperimentConfig& config) {
    std::vector<SweepRecord> records;
    records.reserve(config.policies.size() * config.estimators.size());
    for (const Policy& policy : config.policies) {
        for (Method estimator : config.estimators) {
            PolicyEval eval{policy,
                            evaluate_policy(config.system, config.model, policy, estimator,
                                            config.sim)};
            records.push_back(
                make_record(config.scenario_id, config.system, config.model, eval, config.sim));
        }
    }
    return records;
}

std::vector<SweepRecord> run_config(const std::string& path) {
    const ExperimentConfig config = load_config(path);
    std::vector<SweepRecord> records = run_experiment(config);
    if (config.output) write_records(records, *config.output);
    return records;
}

std::string records_to_csv(const std::vector<SweepRecord>& records) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& r : records) {
        out += csv_quote(r.scenario_id);
        out += ',' + std::to_string(r.n);
        out += ',' + std::to_string(r.j);
        out += ',' + format_double(r.l);
        out += ',' + std::to_string(r.k);
        out += ',' + format_double(r.r);
        out += ',' + std::to_string(r.b);
        out += ',' + std::to_string(r.g);
        out += ',' + csv_quote(r.model_type);
        out += ',' + csv_quote(r.model_params);
        out += ',' + csv_quote(r.estimator);
        out += ',' + format_double(r.mean);
        out += ',' + format_double(r.std_err);
        out += ',' + std::to_string(r.samples);
        out += ',' + std::to_string(r.seed);
        out += '\n';
    }
    return out;
}

std::vector<SweepRecord> records_from_csv(const std::string& text) {
    const auto rows = parse_csv_rows(text);
    if (rows.empty()) throw std::invalid_argument("csv: empty document");
    {
        std::string header;
        for (std::size_t i = 0; i < rows[0].size(); ++i) {
            if (i) header += ',';
            header += rows[0][i];
        }
        if (header != kCsvHeader)
            throw std::invalid_argument("csv: unexpected header '" + header + "'");
    }
    std::vector<SweepRecord> records;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 15)
            throw std::invalid_argument("csv: row " + std::to_string(i) + " has " +
                                        std::to_string(row.size()) + " fields, expected 15");
        SweepRecord r;
        r.scenario_id = row[0];
        r.n = to_int(row[1]);
        r.j = to_int(row[2]);
        r.l = to_double(row[3]);
        r.k = to_int(row[4]);
        r.r = to_double(row[5]);
        r.b = to_int(row[6]);
        r.g = to_int(row[7]);
        r.model_type = row[8];
        r.model_params = row[9];
        r.estimator = row[10];
        r.mean = to_double(row[11]);
        r.std_err = to_double(row[12]);
        r.samples = to_int(row[13]);
        r.seed = to_uint(row[14]);
        records.push_back(std::move(r));
    }
    return records;
}

std::string records_to_json(const std::vector<SweepRecord>& records) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : records) {
        ordered_json o;
        o["scenario_id"] = r.scenario_id;
        o["n"] = r.n;
        o["j"] = r.j;
        o["l"] = r.l;
        o["k"] = r.k;
        o["r"] = r.r;
        o["b"] = r.b;
        o["g"] = r.g;
        o["model_type"] = r.model_type;
        o["model_params"] = r.model_params;
        o["estimator"] = r.estimator;
        o["mean"] = r.mean;
        o["std_err"] = r.std_err;
        o["samples"] = r.samples;
        o["seed"] = r.seed;
        arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::filesystem::path target(path);
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::invalid_argument("output: cannot write '" + tmp.string() + "'");
        out << contents;
        if (!out) throw std::invalid_argument("output: short write to '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, target);
}

void write_records(const std::vector<SweepRecord>& records, const OutputSpec& output) {
    write_file_atomic(output.path, output.format == OutputFormat::csv
                                       ? records_to_csv(records)
                                       : records_to_json(records));
}

namespace {

PresetResult batch_preset(const std::string& name, const SystemSpec& spec,
                          const ServiceModel& model, const std::vector<std::int64_t>& ks) {
    PresetResult result;
    const SimOptions opts;
    for (std::int64_t k : ks) {
        const auto report = optimize_batch(spec, model, k, Method::quadrature, false, opts);
        for (const auto& eval : report.table)
            result.records.push_back(make_record(name, spec, model, eval, opts));
        result.verdicts.push_back("b* = " + std::to_string(report.best_policy.b) +
                                  " at k=" + std::to_string(k));
    }
    return result;
}

PresetResult joint_preset(const std::string& name, const SystemSpec& spec,
                          const ServiceModel& model) {
    PresetResult result;
    const SimOptions opts;
    const auto report = optimize_joint(spec, model, Method::quadrature, opts);
    for (const auto& eval : report.table)
        result.records.push_back(make_record(name, spec, model, eval, opts));
    result.verdicts.push_back("(k,b)* = (" + std::to_string(report.best_policy.k) + "," +
                              std::to_string(report.best_policy.b) + ")");
    return result;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "fig3d", "table_rprime"};
}

PresetResult run_preset(const std::string& name) {
    // Batch-size sweeps use delta=1, w=1: the argmin is invariant to delta
    // and to rescaling w, so the verdicts are parameter-free.
    if (name == "fig2a")
        return batch_preset(name, SystemSpec(10, 112), ShiftedExponential(1.0, 1.0), {4, 8});
    if (name == "fig2b")
        return batch_preset(name, SystemSpec(10, 112), ShiftedExponential(1.0, 1.0), {7});
    if (name == "fig2c")
        return batch_preset(name, SystemSpec(10, 56), ShiftedExponential(1.0, 1.0), {7});
    if (name == "fig3a")
        return joint_preset(name, SystemSpec(10, 60), ShiftedExponential(0.1, 1.0));
    if (name == "fig3b")  // delta=3 per the scenario text (its caption says 10)
        return joint_preset(name, SystemSpec(10, 60), ShiftedExponential(3.0, 1.0));
    if (name == "fig3c")
        return joint_preset(name, SystemSpec(12, 12), ShiftedExponential(1.0, 1.0));
    if (name == "fig3d")
        return joint_preset(name, SystemSpec(10, 60), ShiftedExponential(1.0, 1.0));
    if (name == "table_rprime") {
        const ThresholdResult t = solve_r_prime();
        char m1[64], rp[64];
        std::snprintf(m1, sizeof m1, "m1 = %.6f", t.m1);
        std::snprintf(rp, sizeof rp, "R' = %.6f", t.r_prime);
        return {{}, {m1, rp}};
    }
    throw std::invalid_argument("unknown preset '" + name +
                                "' (fig2a|fig2b|fig2c|fig3a|fig3b|fig3c|fig3d|table_rprime)");
}

}  // namespace codedbatch

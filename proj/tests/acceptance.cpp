// Acceptance suite: one pass/fail line per criterion, with runtime.
// Exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "codedbatch/analytic.hpp"
#include "codedbatch/optimizer.hpp"
#include "codedbatch/service_model.hpp"
#include "codedbatch/simulator.hpp"
#include "codedbatch/special_fn.hpp"

using namespace codedbatch;

namespace {

struct Failure {
    std::string detail;
};

using Details = std::vector<std::string>;

void note(Details& d, const std::string& line) { d.push_back(line); }

// ---- criterion 1: sample-path inequalities ----------------------------------

bool criterion_sample_paths(Details& d) {
    Rng rng(424242);
    const ShiftedExponential se(0.3, 1.0);
    std::int64_t groupings = 0, violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 8);
        const std::int64_t s = 1 + static_cast<std::int64_t>(rng() % 12);
        CuMatrix cu(n, s);
        for (auto& v : cu.data)
            v = (trial % 2) ? sample_cu(ServiceModel(se), rng) : 2.0 * uniform01(rng);
        for (std::int64_t div = 1; div <= s; ++div) {
            if (s % div != 0) continue;
            const std::vector<std::int64_t> blocks(static_cast<std::size_t>(s / div), div);
            ++groupings;
            if (!check_min_superadditivity(cu, blocks).holds) ++violations;
            if (!check_max_subadditivity(cu, blocks).holds) ++violations;
        }
    }
    note(d, "1000 matrices, " + std::to_string(groupings) + " groupings, " +
                std::to_string(violations) + " violations");
    return violations == 0;
}

// ---- criterion 2: oracle equivalence ----------------------------------------

double brute_bimodal(const BiModal& bm, std::int64_t n, std::int64_t k, std::int64_t b,
                     std::int64_t g) {
    std::vector<double> choose(static_cast<std::size_t>(b) + 1, 0.0);
    choose[0] = 1.0;
    for (std::int64_t row = 1; row <= b; ++row)
        for (std::int64_t j = row; j >= 1; --j) choose[j] += choose[j - 1];
    std::vector<double> pmf(static_cast<std::size_t>(b) + 1);
    for (std::int64_t j = 0; j <= b; ++j)
        pmf[j] = choose[j] * std::pow(bm.eps, static_cast<double>(j)) *
                 std::pow(1.0 - bm.eps, static_cast<double>(b - j));
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n), 0);
    std::vector<double> times(static_cast<std::size_t>(n));
    double expectation = 0.0;
    while (true) {
        double weight = 1.0;
        for (std::int64_t i = 0; i < n; ++i) {
            weight *= pmf[counts[i]];
            times[i] = static_cast<double>(b) * bm.t_fast +
                       static_cast<double>(counts[i]) * (bm.t_slow - bm.t_fast);
        }
        std::nth_element(times.begin(), times.begin() + (k - 1), times.end());
        expectation += weight * times[k - 1];
        std::int64_t pos = 0;
        while (pos < n && ++counts[pos] > b) counts[pos++] = 0;
        if (pos == n) break;
    }
    return static_cast<double>(g) * expectation;
}

bool criterion_oracles(Details& d) {
    bool ok = true;
    double worst_rel = 0.0;
    const ShiftedExponential se(0.7, 1.3);
    for (std::int64_t n = 2; n <= 50; ++n) {
        for (std::int64_t k = 1; k <= n; ++k) {
            const double quad = quadrature_ejct(se, n, k, 1, 2);
            const double exact = exact_b1_ejct(se, n, k, 2);
            const double rel = std::abs(quad - exact) / exact;
            worst_rel = std::max(worst_rel, rel);
            if (rel > 1e-6) ok = false;
        }
    }
    note(d, "quadrature(b=1) vs closed form: worst rel err " + std::to_string(worst_rel));

    double worst_abs = 0.0;
    const BiModal bm(0.8, 2.2, 0.35);
    for (std::int64_t n = 1; n <= 4; ++n)
        for (std::int64_t k = 1; k <= n; ++k)
            for (std::int64_t b = 1; b <= 3; ++b) {
                const double diff =
                    std::abs(exact_bimodal_ejct(bm, n, k, b, 2) - brute_bimodal(bm, n, k, b, 2));
                worst_abs = std::max(worst_abs, diff);
                if (diff > 1e-12) ok = false;
            }
    note(d, "bimodal vs brute force: worst abs err " + std::to_string(worst_abs));
    return ok;
}

// ---- criterion 3: Monte Carlo calibration -----------------------------------

bool criterion_monte_carlo(Details& d) {
    struct Case {
        SystemSpec spec;
        Policy policy;
        ServiceModel model;
    };
    const ShiftedExponential se_a(1.0, 1.0);
    const ShiftedExponential se_b(0.5, 2.0);
    const ShiftedExponential se_c(2.0, 0.5);
    const BiModal bm_a(1.0, 5.0, 0.2);
    const BiModal bm_b(0.5, 3.0, 0.7);
    const std::vector<Case> grid = {
        {{10, 60}, {1, 1}, se_a},  {{10, 60}, {2, 3}, se_a},  {{10, 60}, {3, 4}, se_a},
        {{10, 60}, {4, 5}, se_a},  {{10, 60}, {5, 1}, se_a},  {{10, 60}, {6, 2}, se_a},
        {{10, 60}, {10, 6}, se_a}, {{10, 60}, {10, 1}, se_a}, {{5, 20}, {1, 4}, se_b},
        {{5, 20}, {2, 2}, se_b},   {{5, 20}, {2, 10}, se_b},  {{5, 20}, {4, 5}, se_b},
        {{5, 20}, {5, 4}, se_b},   {{20, 40}, {4, 10}, se_c}, {{20, 40}, {10, 2}, se_c},
        {{20, 40}, {20, 2}, se_c}, {{10, 40}, {2, 4}, bm_a},  {{10, 40}, {4, 10}, bm_a},
        {{10, 40}, {10, 4}, bm_a}, {{4, 16}, {1, 2}, bm_b},
    };
    SimOptions opts;
    opts.samples = 100000;
    opts.seed = 42;

    bool ok = true;
    double worst_sigma = 0.0;
    for (const auto& c : grid) {
        const PolicyDims dims = policy_dims(c.spec, c.policy);
        const CompletionEstimate est = simulate_ejct(c.spec, c.policy, c.model, opts);
        const double oracle =
            is_shifted_exponential(c.model)
                ? quadrature_ejct(c.model, c.spec.n, c.policy.k, c.policy.b, dims.g)
                : exact_bimodal_ejct(c.model, c.spec.n, c.policy.k, c.policy.b, dims.g);
        const double sigmas = std::abs(est.mean - oracle) / est.std_err;
        worst_sigma = std::max(worst_sigma, sigmas);
        if (!(std::abs(est.mean - oracle) <= 4.0 * est.std_err)) {
            ok = false;
            note(d, "policy (k=" + std::to_string(c.policy.k) + ",b=" +
                        std::to_string(c.policy.b) + ") off by " + std::to_string(sigmas) +
                        " sigma");
        }
    }
    note(d, "20 policies at 1e5 samples, worst |sim-oracle| = " + std::to_string(worst_sigma) +
                " sigma");

    // thread-count and engine determinism for a fixed seed
    const SystemSpec spec(10, 60);
    const Policy policy(6, 2);
    SimOptions t1 = opts, t3 = opts;
    t1.threads = 1;
    t3.threads = 3;
    const CompletionEstimate a = simulate_ejct(spec, policy, se_a, t1);
    const CompletionEstimate b = simulate_ejct(spec, policy, se_a, t3);
    const CompletionEstimate c = simulate_ejct_reference(spec, policy, se_a, opts);
    const bool deterministic =
        a.mean == b.mean && a.std_err == b.std_err && a.mean == c.mean && a.std_err == c.std_err;
    note(d, deterministic ? "bit-identical across 1 thread, 3 threads, serial reference"
                          : "DETERMINISM VIOLATION across thread counts");
    return ok && deterministic;
}

// ---- criteria 4 and 5: figure reproductions ---------------------------------

bool criterion_fig2(Details& d) {
    const ShiftedExponential se(1.0, 1.0);
    struct Case {
        SystemSpec spec;
        std::int64_t k;
        std::int64_t want_b;
    };
    const std::vector<Case> cases = {
        {{10, 112}, 8, 14}, {{10, 112}, 4, 1}, {{10, 112}, 7, 16}, {{10, 56}, 7, 1}};
    bool ok = true;
    for (const auto& c : cases) {
        const auto report = optimize_batch(c.spec, se, c.k, Method::quadrature);
        const bool match = report.best_policy.b == c.want_b;
        ok = ok && match;
        note(d, "n=" + std::to_string(c.spec.n) + " J=" + std::to_string(c.spec.j) +
                    " k=" + std::to_string(c.k) + ": b*=" + std::to_string(report.best_policy.b) +
                    " expected " + std::to_string(c.want_b) + (match ? " ok" : " MISMATCH"));
    }
    return ok;
}

bool criterion_fig3(Details& d) {
    bool ok = true;
    struct Case {
        const char* tag;
        SystemSpec spec;
        ShiftedExponential model;
        std::int64_t want_k;  // -1 means "some interior k"
        std::int64_t want_b;  // -1 paired with interior k means b must be 1
    };
    const std::vector<Case> cases = {
        {"fig3a", {10, 60}, {0.1, 1.0}, 1, 1},
        {"fig3b", {10, 60}, {3.0, 1.0}, 10, 6},
        {"fig3c", {12, 12}, {1.0, 1.0}, -1, -1},
        {"fig3d", {10, 60}, {1.0, 1.0}, 10, 6},
    };
    for (const auto& c : cases) {
        const auto report = optimize_joint(c.spec, c.model, Method::quadrature);
        bool match;
        if (c.want_k < 0) {
            match = report.best_policy.k > 1 && report.best_policy.k < c.spec.n &&
                    report.best_policy.b == 1;
        } else {
            match = report.best_policy.k == c.want_k && report.best_policy.b == c.want_b;
        }
        ok = ok && match;
        std::string line = std::string(c.tag) + ": (k,b)*=(" +
                           std::to_string(report.best_policy.k) + "," +
                           std::to_string(report.best_policy.b) + ")";
        if (c.want_k >= 0)
            line += " expected (" + std::to_string(c.want_k) + "," + std::to_string(c.want_b) + ")";
        else
            line += " expected interior k with b=1";
        line += match ? " ok" : " MISMATCH";
        if (!match && std::string(c.tag) == "fig3a") {
            const double claimed =
                evaluate_policy(c.spec, c.model, Policy(1, 1), Method::quadrature).mean;
            line += " [computed argmin costs " + std::to_string(report.best_value) +
                    ", the expected policy costs " + std::to_string(claimed) + "]";
        }
        note(d, line);
    }
    return ok;
}

// ---- criterion 6: threshold ---------------------------------------------------

bool criterion_threshold(Details& d) {
    const ThresholdResult t = solve_r_prime();
    const double residual = std::abs(std::exp(t.m1) - 1.0 - 2.0 * t.m1);
    note(d, "m1=" + std::to_string(t.m1) + " R'=" + std::to_string(t.r_prime) +
                " residual=" + std::to_string(residual));
    return std::abs(t.m1 - 1.25643) <= 1e-4 && std::abs(t.r_prime - 0.71534) <= 1e-4 &&
           residual <= 1e-9;
}

// ---- criterion 7: special-function suite --------------------------------------

bool criterion_special(Details& d) {
    double worst_round = 0.0;
    for (int ri = 1; ri <= 19; ++ri) {
        const double r = 0.05 * ri;
        for (std::int64_t b = 1; b <= 200; ++b) {
            const double m = inverse_gamma_p(r, b);
            worst_round = std::max(worst_round, std::abs(regularized_gamma_p(b, m) - r));
        }
    }
    note(d, "inverse roundtrip worst |P(b,m)-r| = " + std::to_string(worst_round));

    double worst_seed = 0.0;
    for (int ri = 0; ri <= 12; ++ri) {
        const double r = 0.2 + 0.05 * ri;
        for (std::int64_t b = 20; b <= 200; ++b) {
            const double m = inverse_gamma_p(r, b);
            worst_seed = std::max(
                worst_seed, std::abs(batch_from_m_normal_approx(m, r) - static_cast<double>(b)));
        }
    }
    note(d, "normal-approximation seed worst |b_hat - b| = " + std::to_string(worst_seed));
    return worst_round <= 1e-10 && worst_seed <= 2.0;
}

// ---- criterion 8: endpoint optimality of f ------------------------------------

bool criterion_endpoints(Details& d) {
    const double r_prime = solve_r_prime().r_prime;
    bool ok = true;
    for (int ri = 1; ri <= 9; ++ri) {
        const double r = 0.1 * ri;
        std::int64_t argmin = 0;
        double best = 1e300;
        for (std::int64_t b = 1; b <= 200; ++b) {
            const double f = inverse_gamma_p(r, b) / (r * static_cast<double>(b));
            if (f < best) {
                best = f;
                argmin = b;
            }
        }
        const bool endpoint = argmin == 1 || argmin == 200;
        const bool upper_ok = r <= r_prime || argmin == 200;
        if (!endpoint || !upper_ok) {
            ok = false;
            note(d, "R=" + std::to_string(r) + ": interior or misplaced argmin b=" +
                        std::to_string(argmin));
        }
    }
    note(d, ok ? "grid minima at endpoints; upper endpoint above R'" : "endpoint property violated");
    return ok;
}

struct CriterionSpec {
    int id;
    const char* label;
    double limit_seconds;
    std::function<bool(Details&)> run;
};

}  // namespace

int main() {
    const std::vector<CriterionSpec> criteria = {
        {1, "sample-path superadditivity/subadditivity", 5.0, criterion_sample_paths},
        {2, "oracle equivalence (quadrature vs closed forms)", 30.0, criterion_oracles},
        {3, "Monte Carlo calibration and determinism", 60.0, criterion_monte_carlo},
        {4, "fixed-rate batch argmins (J=112/56 scenarios)", 10.0, criterion_fig2},
        {5, "joint (k,b) argmins (four straggling scenarios)", 10.0, criterion_fig3},
        {6, "code-rate threshold R'", 1.0, criterion_threshold},
        {7, "special-function roundtrip and seed quality", 5.0, criterion_special},
        {8, "endpoint optimality of f(b,R)", 5.0, criterion_endpoints},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        Details details;
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = c.run(details);
        } catch (const std::exception& e) {
            details.push_back(std::string("exception: ") + e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.limit_seconds) {
            ok = false;
            details.push_back("runtime " + std::to_string(secs) + "s exceeds limit " +
                              std::to_string(c.limit_seconds) + "s");
        }
        std::printf("criterion %d: %s — %s (%.2f s)\n", c.id, ok ? "PASS" : "FAIL", c.label,
                    secs);
        for (const auto& line : details) std::printf("    %s\n", line.c_str());
        if (!ok) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures;
}

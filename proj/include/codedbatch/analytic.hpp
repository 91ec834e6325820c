#pragma once

#include <cstdint>
#include <vector>

#include "codedbatch/service_model.hpp"

// Closed-form, quadrature and exact-enumeration evaluators of expected job
// completion time, the R' code-rate threshold, and the batch-size derivative
// diagnostic. All functions are pure and reentrant.

namespace codedbatch {

struct AsymptoticResult {
    double expected_time;  // l*delta/r + l*w*m/(r*b)
    double m;              // root of P(b,m) = r
    double f_value;        // m/(r*b)
};

// Large-n expected job completion time for the shifted exponential law.
// Defined only for shifted-exponential models and r strictly inside (0,1).
AsymptoticResult asymptotic_ejct(const ServiceModel& model, double l, double r, std::int64_t b);

// Exact finite-n expectation G * E[k-th smallest of n batch times] for the
// shifted exponential law: g*(b*delta + w * integral of the order-statistic
// survival function), adaptive Simpson at relative tolerance 1e-9 truncated
// where survival < 1e-12. Bi-modal models are served by exact_bimodal_ejct.
double quadrature_ejct(const ServiceModel& model, std::int64_t n, std::int64_t k, std::int64_t b,
                       std::int64_t g);

// Closed-form b=1 oracle: exponential order statistics give
// E[X_{k:n}] = delta + w*(H_n - H_{n-k}), with H_0 = 0.
double exact_b1_ejct(const ServiceModel& model, std::int64_t n, std::int64_t k, std::int64_t g);

// Exact expectation on the discrete bi-modal batch law (b+1 support points,
// binomial slow-count weights), exact up to floating point.
double exact_bimodal_ejct(const ServiceModel& model, std::int64_t n, std::int64_t k,
                          std::int64_t b, std::int64_t g);

struct ThresholdResult {
    double m1;       // solves e^m = 1 + 2m on m > 0
    double r_prime;  // 1 - e^{-m1}
};

// Code-rate threshold above which the maximum batch size is asymptotically
// optimal. Bisection on a sign-verified bracket; residual <= 1e-9.
ThresholdResult solve_r_prime();

enum class ScanShape { increasing, decreasing, unimodal, other };

struct FScanEntry {
    std::int64_t b;
    double f_value;  // m/(r*b)
    int deriv_sign;  // sign of the normal-approximation derivative; 0 if indeterminate
};

struct FScanResult {
    std::vector<FScanEntry> entries;
    ScanShape shape;     // classification of the f-value sequence itself
    int sign_mismatches; // grid steps where the approximate sign disagrees
};

// Evaluates f(b,r) = m/(r*b) over an ascending batch grid, tags each point
// with the approximate derivative sign 2*sqrt(m)/(Z+2*sqrt(m)) - m/b, and
// classifies the sequence. Approximation/finite-difference disagreements are
// counted, not hidden.
FScanResult f_derivative_scan(double r, const std::vector<std::int64_t>& b_grid);

const char* scan_shape_name(ScanShape s);

}  // namespace codedbatch

#pragma once

#include <cstdint>

// Numerically stable special functions backing the analytic evaluators:
// regularized lower incomplete gamma with integer shape (equivalently the
// Poisson right tail), its inverse in the second argument, the standard
// normal CDF/quantile pair, binomial order-statistic tails, and harmonic
// numbers.

namespace codedbatch {

// P(b, m) = 1/(b-1)! * integral_0^m t^(b-1) e^(-t) dt
//         = Pr[Poisson(m) >= b].
// Absolute error <= 1e-12 for b up to 1e6; the Poisson series is summed in
// scaled units outward from its largest term, with the peak-term exponent
// evaluated through a Stirling split so large b and m do not cancel.
double regularized_gamma_p(std::int64_t b, double m);

// Unique m >= 0 with P(b, m) = r, for r in (0,1). Newton seeded by the
// normal approximation, safeguarded by a verified bracket. |P(b,m)-r| is
// driven below 1e-13 (contract: 1e-10). Rejects r outside (0,1); r = 1
// would need m = infinity.
double inverse_gamma_p(double r, std::int64_t b);

// log Pr[Poisson(m) = k]; also the log-density of Gamma(k+1,1) at m.
double log_poisson_pmf(std::int64_t k, double m);

double std_normal_cdf(double z);
// Inverse of std_normal_cdf; requires p in (0,1). Rational initial
// estimate refined with one Halley step, mutually inverse with the CDF to
// well below 1e-10 over p in [1e-8, 1-1e-8].
double std_normal_quantile(double p);

// Normal-approximation inverse of the Poisson tail: the batch size whose
// gamma argument is m at code rate r, b ~ Z*sqrt(m) + m + 1 with
// Phi(Z) = 1 - r. Used as the Newton seed and as a diagnostic.
double batch_from_m_normal_approx(double m, double r);

// CDF of the k-th smallest of n iid draws, given the marginal CDF value F:
// sum_{j=k}^{n} C(n,j) F^j (1-F)^(n-j). Summed from the shorter tail in
// scaled units; no overflow for n well beyond 1e4.
double order_stat_cdf(std::int64_t k, std::int64_t n, double F);

// H_n = sum_{i=1}^n 1/i, n >= 1.
double harmonic(std::int64_t n);

}  // namespace codedbatch

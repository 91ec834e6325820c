#include "codedbatch/special_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "codedbatch/errors.hpp"

namespace codedbatch {

namespace {

// lgamma(k+1) - [k ln k - k + 0.5 ln(2 pi k)], i.e. the Stirling series
// remainder. Valid to ~4e-17 for k >= 30.
double stirling_remainder(double k) {
    const double k2 = k * k;
    return 1.0 / (12.0 * k) - 1.0 / (360.0 * k * k2) + 1.0 / (1260.0 * k * k2 * k2) -
           1.0 / (1680.0 * k * k2 * k2 * k2);
}

constexpr double kLogUnderflow = -745.0;  // below this exp() is 0.0

}  // namespace

double log_poisson_pmf(std::int64_t k, double m) {
    if (k < 0) throw std::invalid_argument("log_poisson_pmf: k must be >= 0");
    if (!(m >= 0.0)) throw std::invalid_argument("log_poisson_pmf: m must be nonnegative");
    if (m == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    const double kd = static_cast<double>(k);
    if (k < 30) return kd * std::log(m) - m - std::lgamma(kd + 1.0);
    // k ln m - m - lgamma(k+1) rewritten so the leading k-sized terms cancel
    // exactly: with d = (m-k)/k this is k*(log1p(d) - d) - 0.5 ln(2 pi k) - rem.
    const double d = (m - kd) / kd;
    return kd * (std::log1p(d) - d) - 0.5 * std::log(2.0 * std::numbers::pi * kd) -
           stirling_remainder(kd);
}

double regularized_gamma_p(std::int64_t b, double m) {
    if (b < 1) throw std::invalid_argument("regularized_gamma_p: shape b must be a positive integer");
    if (!(m >= 0.0)) throw std::invalid_argument("regularized_gamma_p: m must be nonnegative");
    if (m == 0.0) return 0.0;

    if (m < static_cast<double>(b)) {
        // P = Pr[Poisson(m) >= b] summed upward from k = b; terms decay since
        // the peak sits below b. Direct summation keeps the small tail at full
        // relative precision (1 - Q would round it away).
        double sum = 1.0, term = 1.0;
        for (std::int64_t k = b;; ++k) {
            term *= m / static_cast<double>(k + 1);
            sum += term;
            if (term <= sum * 1e-18) break;
        }
        const double log_p = log_poisson_pmf(b, m) + std::log(sum);
        return log_p < kLogUnderflow ? 0.0 : std::clamp(std::exp(log_p), 0.0, 1.0);
    }

    // Q = Pr[Poisson(m) <= b-1] summed downward from its largest term at b-1
    // (the peak floor(m) lies at or above it); P = 1 - Q.
    double sum = 1.0, term = 1.0;
    for (std::int64_t k = b - 1; k >= 1; --k) {
        term *= static_cast<double>(k) / m;
        sum += term;
        if (term <= sum * 1e-18) break;
    }
    const double log_q = log_poisson_pmf(b - 1, m) + std::log(sum);
    if (log_q < kLogUnderflow) return 1.0;
    return std::clamp(1.0 - std::exp(log_q), 0.0, 1.0);
}

double std_normal_cdf(double z) {
    return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0);
}

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("std_normal_quantile: p must lie strictly in (0,1)");
    // Work on the lower half, where the erfc-based CDF carries full relative
    // precision; 1-p is exact for p in [0.5, 1).
    if (p > 0.5) return -std_normal_quantile(1.0 - p);

    // Acklam's rational approximation (~1e-9), then one Halley step against
    // the CDF brings it to machine precision.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double bc[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((bc[0] * r + bc[1]) * r + bc[2]) * r + bc[3]) * r + bc[4]) * r + 1.0);
    }

    if (x > -37.0) {  // further out exp(x^2/2) overflows; Acklam alone is ~1e-9
        const double e = std_normal_cdf(x) - p;
        const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double batch_from_m_normal_approx(double m, double r) {
    if (!(m > 0.0)) throw std::invalid_argument("batch_from_m_normal_approx: m must be positive");
    const double z = std_normal_quantile(1.0 - r);  // validates r in (0,1)
    return z * std::sqrt(m) + m + 1.0;
}

double inverse_gamma_p(double r, std::int64_t b) {
    if (b < 1) throw std::invalid_argument("inverse_gamma_p: shape b must be a positive integer");
    if (!(r > 0.0 && r < 1.0))
        throw std::invalid_argument(
            "inverse_gamma_p: code rate must lie strictly in (0,1); undefined at r=1");
    if (b == 1) return -std::log1p(-r);  // P(1,m) = 1 - e^{-m}

    // Seed from the normal approximation b ~ Z sqrt(m) + m + 1.
    const double z = std_normal_quantile(1.0 - r);
    const double disc = z * z + 4.0 * static_cast<double>(b - 1);
    double x = 0.25 * (std::sqrt(disc) - z) * (std::sqrt(disc) - z);
    if (!(x > 0.0) || !std::isfinite(x)) x = static_cast<double>(b);

    // Verified bracket around the root.
    double lo = x, hi = x;
    while (regularized_gamma_p(b, lo) > r && lo > 1e-300) lo *= 0.5;
    while (regularized_gamma_p(b, hi) < r) {
        hi *= 2.0;
        if (!std::isfinite(hi)) throw NumericalError("inverse_gamma_p: bracket expansion diverged");
    }
    x = std::clamp(x, lo, hi);

    // Safeguarded Newton in probability space; dP/dm is the Gamma(b,1) pdf.
    for (int iter = 0; iter < 200; ++iter) {
        const double err = regularized_gamma_p(b, x) - r;
        if (std::abs(err) <= 1e-13) return x;
        if (err > 0.0) hi = x; else lo = x;

        const double log_pdf = log_poisson_pmf(b - 1, x);
        double next;
        if (log_pdf > kLogUnderflow) {
            next = x - err / std::exp(log_pdf);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        } else {
            next = 0.5 * (lo + hi);
        }
        if (hi - lo <= 1e-15 * hi) return 0.5 * (lo + hi);
        x = next;
    }
    throw NumericalError("inverse_gamma_p: did not converge (r=" + std::to_string(r) +
                         ", b=" + std::to_string(b) + ")");
}

double order_stat_cdf(std::int64_t k, std::int64_t n, double F) {
    if (n < 1) throw std::invalid_argument("order_stat_cdf: n must be >= 1");
    if (k < 1 || k > n)
        throw std::invalid_argument("order_stat_cdf: k=" + std::to_string(k) +
                                    " outside [1, n=" + std::to_string(n) + "]");
    if (!(F >= 0.0 && F <= 1.0)) throw std::invalid_argument("order_stat_cdf: F outside [0,1]");
    if (F <= 0.0) return 0.0;
    if (F >= 1.0) return 1.0;

    const double nd = static_cast<double>(n);
    const double mean = nd * F;
    const double odds = F / (1.0 - F);
    const auto log_pmf = [&](std::int64_t j) {
        const double jd = static_cast<double>(j);
        return std::lgamma(nd + 1.0) - std::lgamma(jd + 1.0) - std::lgamma(nd - jd + 1.0) +
               jd * std::log(F) + (nd - jd) * std::log1p(-F);
    };

    if (static_cast<double>(k) > mean) {
        // Upper tail sum_{j=k}^{n} pmf(j); terms decay since k > nF.
        double sum = 1.0, term = 1.0;
        for (std::int64_t j = k; j < n; ++j) {
            term *= static_cast<double>(n - j) / static_cast<double>(j + 1) * odds;
            sum += term;
            if (term <= sum * 1e-18) break;
        }
        const double lt = log_pmf(k) + std::log(sum);
        return lt < kLogUnderflow ? 0.0 : std::clamp(std::exp(lt), 0.0, 1.0);
    }
    // Complement through the lower tail sum_{j=0}^{k-1}; terms decay downward.
    double sum = 1.0, term = 1.0;
    for (std::int64_t j = k - 1; j >= 1; --j) {
        term *= static_cast<double>(j) / (static_cast<double>(n - j + 1) * odds);
        sum += term;
        if (term <= sum * 1e-18) break;
    }
    const double lt = log_pmf(k - 1) + std::log(sum);
    const double lower = lt < kLogUnderflow ? 0.0 : std::exp(lt);
    return std::clamp(1.0 - lower, 0.0, 1.0);
}

double harmonic(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("harmonic: n must be a positive integer");
    double h = 0.0;
    for (std::int64_t i = n; i >= 1; --i) h += 1.0 / static_cast<double>(i);
    return h;
}

}  // namespace codedbatch

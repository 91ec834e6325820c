#include "codedbatch/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "codedbatch/errors.hpp"
#include "codedbatch/special_fn.hpp"

namespace codedbatch {

namespace {

void check_order(std::int64_t n, std::int64_t k) {
    if (n < 1) throw std::invalid_argument("worker count n must be >= 1");
    if (k < 1 || k > n)
        throw std::invalid_argument("k=" + std::to_string(k) + " outside [1, n=" +
                                    std::to_string(n) + "]");
}

double harmonic0(std::int64_t n) { return n == 0 ? 0.0 : harmonic(n); }

// Recursive Simpson with Richardson acceptance; force_depth levels are always
// split so a locally flat coarse view cannot end refinement early.
double adapt(const std::function<double(double)>& f, double a, double b, double fa, double fm,
             double fb, double whole, double eps, int depth, int force_depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (force_depth <= 0 && (depth <= 0 || std::abs(delta) <= 15.0 * eps))
        return left + right + delta / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1, force_depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1, force_depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol) {
    // Coarse 16-panel composite pass fixes the absolute-error scale.
    const int n0 = 16;
    const double h = (b - a) / n0;
    double coarse = 0.0;
    for (int i = 0; i < n0; ++i) {
        const double x0 = a + i * h;
        coarse += h / 6.0 * (f(x0) + 4.0 * f(x0 + 0.5 * h) + f(x0 + h));
    }
    const double eps = rel_tol * std::max(std::abs(coarse), 1e-30);
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adapt(f, a, b, fa, fm, fb, whole, eps, 48, 6);
}

}  // namespace

AsymptoticResult asymptotic_ejct(const ServiceModel& model, double l, double r, std::int64_t b) {
    const auto* se = std::get_if<ShiftedExponential>(&model);
    if (!se)
        throw std::invalid_argument("asymptotic formula defined for shifted exponential only");
    if (!(l > 0.0)) throw std::invalid_argument("job scale factor l must be positive");
    if (!(r > 0.0 && r < 1.0))
        throw std::invalid_argument("asymptotic formula requires code rate strictly in (0,1)");
    if (b < 1) throw std::invalid_argument("batch size b must be a positive integer");

    const double m = inverse_gamma_p(r, b);
    const double f = m / (r * static_cast<double>(b));
    return {l * se->delta / r + l * se->w * f, m, f};
}

double quadrature_ejct(const ServiceModel& model, std::int64_t n, std::int64_t k, std::int64_t b,
                       std::int64_t g) {
    const auto* se = std::get_if<ShiftedExponential>(&model);
    if (!se)
        throw std::invalid_argument(
            "quadrature evaluator is for shifted exponential; use exact_bimodal_ejct");
    check_order(n, k);
    if (b < 1 || g < 1) throw std::invalid_argument("b and g must be positive integers");

    // Survival function of the k-th order statistic of n iid Gamma(b,1) draws.
    const auto survival = [n, k, b](double t) {
        return 1.0 - order_stat_cdf(k, n, regularized_gamma_p(b, t));
    };

    const double bd = static_cast<double>(b);
    double upper = bd + 10.0 * std::sqrt(bd) + 20.0;
    int doublings = 0;
    while (survival(upper) >= 1e-12) {
        upper *= 2.0;
        if (++doublings > 60)
            throw NumericalError("quadrature_ejct: survival tail failed to decay");
    }
    const double integral = adaptive_simpson(survival, 0.0, upper, 1e-9);
    return static_cast<double>(g) * (bd * se->delta + se->w * integral);
}

double exact_b1_ejct(const ServiceModel& model, std::int64_t n, std::int64_t k, std::int64_t g) {
    const auto* se = std::get_if<ShiftedExponential>(&model);
    if (!se) throw std::invalid_argument("exact_b1_ejct requires a shifted-exponential model");
    check_order(n, k);
    if (g < 1) throw std::invalid_argument("g must be a positive integer");
    return static_cast<double>(g) *
           (se->delta + se->w * (harmonic0(n) - harmonic0(n - k)));
}

double exact_bimodal_ejct(const ServiceModel& model, std::int64_t n, std::int64_t k,
                          std::int64_t b, std::int64_t g) {
    const auto* bm = std::get_if<BiModal>(&model);
    if (!bm) throw std::invalid_argument("exact bimodal evaluator requires a bi-modal model");
    check_order(n, k);
    if (b < 1 || g < 1) throw std::invalid_argument("b and g must be positive integers");

    // Batch CDF at slow-count j is Pr[Bin(b,eps) <= j]; the order-statistic
    // CDF differences at the b+1 support points give the exact expectation.
    const double base = static_cast<double>(b) * bm->t_fast;
    const double step = bm->t_slow - bm->t_fast;
    double expectation = 0.0;
    double prev = 0.0;
    for (std::int64_t j = 0; j <= b; ++j) {
        double batch_F;
        if (j == b || bm->eps <= 0.0)
            batch_F = 1.0;
        else if (bm->eps >= 1.0)
            batch_F = 0.0;
        else
            batch_F = 1.0 - order_stat_cdf(j + 1, b, bm->eps);
        const double cur = order_stat_cdf(k, n, batch_F);
        expectation += (base + static_cast<double>(j) * step) * (cur - prev);
        prev = cur;
    }
    return static_cast<double>(g) * expectation;
}

ThresholdResult solve_r_prime() {
    const auto gfn = [](double m) { return std::exp(m) - 1.0 - 2.0 * m; };
    double lo = 0.5, hi = 3.0;
    if (!(gfn(lo) < 0.0 && gfn(hi) > 0.0))
        throw NumericalError("solve_r_prime: bracket [0.5,3] has unexpected signs");
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (gfn(mid) < 0.0 ? lo : hi) = mid;
        if (hi - lo <= 1e-12) break;
    }
    const double m1 = 0.5 * (lo + hi);
    return {m1, -std::expm1(-m1)};
}

FScanResult f_derivative_scan(double r, const std::vector<std::int64_t>& b_grid) {
    if (b_grid.empty()) throw std::invalid_argument("f_derivative_scan: empty batch grid");
    for (std::size_t i = 0; i < b_grid.size(); ++i) {
        if (b_grid[i] < 1 || (i > 0 && b_grid[i] <= b_grid[i - 1]))
            throw std::invalid_argument(
                "f_derivative_scan: grid must be strictly ascending with values >= 1");
    }
    if (!(r > 0.0 && r < 1.0))
        throw std::invalid_argument("f_derivative_scan: r must lie strictly in (0,1)");

    const double z = std_normal_quantile(1.0 - r);
    FScanResult out;
    out.entries.reserve(b_grid.size());
    for (std::int64_t b : b_grid) {
        const double m = inverse_gamma_p(r, b);
        const double f = m / (r * static_cast<double>(b));
        const double root_m = std::sqrt(m);
        int sign = 0;
        if (z + 2.0 * root_m > 0.0) {
            const double slope = 2.0 * root_m / (z + 2.0 * root_m) - m / static_cast<double>(b);
            sign = slope > 0.0 ? 1 : (slope < 0.0 ? -1 : 0);
        }
        out.entries.push_back({b, f, sign});
    }

    // Classify the actual f sequence from its finite differences.
    bool any_pos = false, any_neg = false, ordered = true;  // all + before all -
    bool seen_neg = false;
    out.sign_mismatches = 0;
    for (std::size_t i = 0; i + 1 < out.entries.size(); ++i) {
        const double d = out.entries[i + 1].f_value - out.entries[i].f_value;
        const double tol = 1e-13 * (1.0 + std::abs(out.entries[i].f_value));
        const int s = d > tol ? 1 : (d < -tol ? -1 : 0);
        if (s > 0) {
            any_pos = true;
            if (seen_neg) ordered = false;
        } else if (s < 0) {
            any_neg = true;
            seen_neg = true;
        }
        if (s != 0 && out.entries[i].deriv_sign != 0 && s != out.entries[i].deriv_sign)
            ++out.sign_mismatches;
    }
    if (any_pos && !any_neg)
        out.shape = ScanShape::increasing;
    else if (any_neg && !any_pos)
        out.shape = ScanShape::decreasing;
    else if (any_pos && any_neg && ordered)
        out.shape = ScanShape::unimodal;
    else
        out.shape = ScanShape::other;
    return out;
}

const char* scan_shape_name(ScanShape s) {
    switch (s) {
        case ScanShape::increasing: return "increasing";
        case ScanShape::decreasing: return "decreasing";
        case ScanShape::unimodal: return "unimodal";
        default: return "other";
    }
}

}  // namespace codedbatch

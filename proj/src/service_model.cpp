#include "codedbatch/service_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "codedbatch/special_fn.hpp"

namespace codedbatch {

ShiftedExponential::ShiftedExponential(double delta_, double w_) : delta(delta_), w(w_) {
    if (!(delta >= 0.0))
        throw std::invalid_argument("shifted_exponential: delta must be >= 0");
    if (!(w > 0.0)) throw std::invalid_argument("shifted_exponential: w must be > 0");
}

BiModal::BiModal(double t_fast_, double t_slow_, double eps_)
    : t_fast(t_fast_), t_slow(t_slow_), eps(eps_) {
    if (!(t_fast > 0.0)) throw std::invalid_argument("bimodal: t_fast must be > 0");
    if (!(t_slow >= t_fast)) throw std::invalid_argument("bimodal: t_slow must be >= t_fast");
    if (!(eps >= 0.0 && eps <= 1.0))
        throw std::invalid_argument("bimodal: eps must lie in [0,1]");
}

BatchTaskLaw::BatchTaskLaw(ServiceModel model_, std::int64_t b_)
    : model(std::move(model_)), b(b_) {
    if (b < 1) throw std::invalid_argument("batch law: b must be a positive integer");
}

double sample_cu(const ServiceModel& model, Rng& rng) {
    if (const auto* se = std::get_if<ShiftedExponential>(&model)) {
        // -log(1-U) with U in [0,1) stays finite and >= 0.
        return se->delta - se->w * std::log1p(-uniform01(rng));
    }
    const auto& bm = std::get<BiModal>(model);
    return uniform01(rng) < bm.eps ? bm.t_slow : bm.t_fast;
}

double sample_batch(const BatchTaskLaw& law, Rng& rng) {
    double t = 0.0;
    for (std::int64_t i = 0; i < law.b; ++i) t += sample_cu(law.model, rng);
    return t;
}

double batch_cdf(const BatchTaskLaw& law, double y) {
    if (!std::isfinite(y)) throw std::invalid_argument("batch_cdf: y must be finite");
    const double bd = static_cast<double>(law.b);
    if (const auto* se = std::get_if<ShiftedExponential>(&law.model)) {
        const double floor_time = bd * se->delta;
        if (y < floor_time) return 0.0;
        return regularized_gamma_p(law.b, (y - floor_time) / se->w);
    }
    // Discrete law on y_j = b*t_fast + j*(t_slow - t_fast) with Binomial(b,eps)
    // weights on the slow-CU count j.
    const auto& bm = std::get<BiModal>(law.model);
    const double base = bd * bm.t_fast;
    const double step = bm.t_slow - bm.t_fast;
    if (y < base) return 0.0;
    if (step == 0.0) return 1.0;
    std::int64_t j = static_cast<std::int64_t>(std::floor((y - base) / step));
    j = std::min(j, law.b);
    // Settle rounding against the canonical support expression base + j*step.
    while (j + 1 <= law.b && base + static_cast<double>(j + 1) * step <= y) ++j;
    while (j >= 0 && base + static_cast<double>(j) * step > y) --j;
    if (j < 0) return 0.0;
    if (j >= law.b) return 1.0;
    // Pr[Bin(b,eps) <= j]
    if (bm.eps <= 0.0) return 1.0;
    if (bm.eps >= 1.0) return 0.0;
    return 1.0 - order_stat_cdf(j + 1, law.b, bm.eps);
}

double batch_mean(const BatchTaskLaw& law) {
    const double bd = static_cast<double>(law.b);
    if (const auto* se = std::get_if<ShiftedExponential>(&law.model))
        return bd * (se->delta + se->w);
    const auto& bm = std::get<BiModal>(law.model);
    return bd * (bm.t_fast + bm.eps * (bm.t_slow - bm.t_fast));
}

}  // namespace codedbatch

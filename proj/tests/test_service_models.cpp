#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"

#include "codedbatch/service_model.hpp"

using namespace codedbatch;

namespace {

double ks_distance_continuous(std::vector<double> samples, const BatchTaskLaw& law) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = batch_cdf(law, samples[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - f));
    }
    return d;
}

}  // namespace

TEST_CASE("model construction validates invariants") {
    CHECK_THROWS_AS(ShiftedExponential(-0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ShiftedExponential(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(BiModal(0.0, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(BiModal(2.0, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(BiModal(1.0, 2.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(BiModal(1.0, 2.0, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(BatchTaskLaw(ShiftedExponential(0.0, 1.0), 0), std::invalid_argument);
    CHECK_NOTHROW(BiModal(1.0, 1.0, 0.3));  // equal levels are a degenerate but valid law
}

TEST_CASE("per-CU sampling") {
    Rng rng(123);
    const ServiceModel fast_only = BiModal(1.0, 5.0, 0.0);
    const ServiceModel slow_only = BiModal(1.0, 5.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        CHECK(sample_cu(fast_only, rng) == 1.0);
        CHECK(sample_cu(slow_only, rng) == 5.0);
    }

    const ServiceModel se = ShiftedExponential(2.0, 1.0);
    double sum = 0.0;
    double lo = 1e300;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) {
        const double x = sample_cu(se, rng);
        sum += x;
        lo = std::min(lo, x);
    }
    CHECK(lo >= 2.0);
    CHECK(sum / draws == doctest::Approx(3.0).epsilon(0.01 / 3.0));
}

TEST_CASE("batch sampling") {
    // b=1 is identical in law (and in stream consumption) to one CU draw
    Rng a(7), bstream(7);
    const ServiceModel se = ShiftedExponential(1.0, 1.0);
    const BatchTaskLaw one(se, 1);
    for (int i = 0; i < 100; ++i) CHECK(sample_batch(one, a) == sample_cu(se, bstream));

    Rng rng(99);
    const BatchTaskLaw det(BiModal(1.0, 5.0, 0.0), 4);
    for (int i = 0; i < 100; ++i) CHECK(sample_batch(det, rng) == 4.0);

    const BatchTaskLaw batch8(se, 8);
    double sum = 0.0;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) sum += sample_batch(batch8, rng);
    CHECK(sum / draws == doctest::Approx(16.0).epsilon(0.05 / 16.0));
}

TEST_CASE("batch draw equals the sum of b successive CU draws") {
    const ServiceModel se = ShiftedExponential(0.5, 2.0);
    const ServiceModel bm = BiModal(1.0, 3.0, 0.4);
    for (const auto& model : {se, bm}) {
        for (std::int64_t b : {1, 2, 5, 16}) {
            Rng r1(4242), r2(4242);
            const BatchTaskLaw law(model, b);
            for (int rep = 0; rep < 50; ++rep) {
                double manual = 0.0;
                for (std::int64_t i = 0; i < b; ++i) manual += sample_cu(model, r1);
                CHECK(sample_batch(law, r2) == manual);
            }
        }
    }
}

TEST_CASE("batch cdf examples") {
    CHECK(batch_cdf(BatchTaskLaw(ShiftedExponential(0.0, 1.0), 1), std::log(2.0)) ==
          doctest::Approx(0.5).epsilon(1e-14));
    // below the deterministic floor b*delta the CDF is exactly zero
    CHECK(batch_cdf(BatchTaskLaw(ShiftedExponential(2.0, 1.0), 3), 5.9) == 0.0);
    CHECK(batch_cdf(BatchTaskLaw(BiModal(1.0, 2.0, 0.5), 2), 3.0) ==
          doctest::Approx(0.75).epsilon(1e-14));
    CHECK_THROWS_AS(
        batch_cdf(BatchTaskLaw(ShiftedExponential(0.0, 1.0), 1),
                  std::numeric_limits<double>::infinity()),
        std::invalid_argument);
}

TEST_CASE("batch cdf is a cdf: nondecreasing with limits 0 and 1") {
    const std::vector<BatchTaskLaw> laws = {
        BatchTaskLaw(ShiftedExponential(0.0, 1.0), 1),
        BatchTaskLaw(ShiftedExponential(1.5, 0.7), 6),
        BatchTaskLaw(BiModal(1.0, 4.0, 0.3), 5),
        BatchTaskLaw(BiModal(2.0, 2.0, 0.9), 3),
    };
    for (const auto& law : laws) {
        double prev = -1.0;
        const double hi = 3.0 * batch_mean(law) + 40.0;
        CHECK(batch_cdf(law, -1.0) == 0.0);
        for (double y = 0.0; y <= hi; y += hi / 400.0) {
            const double f = batch_cdf(law, y);
            CHECK(f >= prev);
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
            prev = f;
        }
        CHECK(batch_cdf(law, 50.0 * batch_mean(law) + 1000.0) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("bimodal batch cdf at and between support points") {
    const BatchTaskLaw law(BiModal(1.0, 2.0, 0.25), 3);
    // support {3, 4, 5, 6}; slow-count j ~ Bin(3, 0.25)
    const double p0 = 0.421875, p1 = 0.421875, p2 = 0.140625, p3 = 0.015625;
    CHECK(batch_cdf(law, 2.999) == 0.0);
    CHECK(batch_cdf(law, 3.0) == doctest::Approx(p0).epsilon(1e-12));
    CHECK(batch_cdf(law, 3.7) == doctest::Approx(p0).epsilon(1e-12));
    CHECK(batch_cdf(law, 4.0) == doctest::Approx(p0 + p1).epsilon(1e-12));
    CHECK(batch_cdf(law, 5.0) == doctest::Approx(p0 + p1 + p2).epsilon(1e-12));
    CHECK(batch_cdf(law, 6.0) == doctest::Approx(p0 + p1 + p2 + p3).epsilon(1e-12));
    CHECK(batch_cdf(law, 6.0) == 1.0);
}

TEST_CASE("empirical cdf matches batch_cdf within KS distance 0.01") {
    const BatchTaskLaw law(ShiftedExponential(0.5, 2.0), 4);
    Rng rng(2024);
    std::vector<double> samples(100000);
    for (auto& s : samples) s = sample_batch(law, rng);
    CHECK(ks_distance_continuous(std::move(samples), law) <= 0.01);

    // discrete law: compare empirical and exact CDF at every support point
    const BatchTaskLaw disc(BiModal(1.0, 3.0, 0.35), 6);
    Rng rng2(2025);
    const int n = 100000;
    std::vector<double> draws(n);
    for (auto& s : draws) s = sample_batch(disc, rng2);
    std::sort(draws.begin(), draws.end());
    for (std::int64_t j = 0; j <= 6; ++j) {
        const double y = 6.0 * 1.0 + static_cast<double>(j) * 2.0;
        const double emp =
            static_cast<double>(std::upper_bound(draws.begin(), draws.end(), y) - draws.begin()) /
            n;
        CHECK(std::abs(emp - batch_cdf(disc, y)) <= 0.01);
    }
}

TEST_CASE("batch mean") {
    CHECK(batch_mean(BatchTaskLaw(ShiftedExponential(1.0, 1.0), 1)) == 2.0);
    CHECK(batch_mean(BatchTaskLaw(BiModal(1.0, 5.0, 0.0), 3)) == 3.0);
    CHECK(batch_mean(BatchTaskLaw(BiModal(1.0, 3.0, 0.25), 4)) == doctest::Approx(6.0).epsilon(1e-14));
}

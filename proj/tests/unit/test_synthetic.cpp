#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hmobo/error.hpp"
#include "hmobo/synthetic.hpp"

using namespace hmobo;

namespace {

double truncated_normal_mean(double mu, double sigma) {
    const double a = mu / sigma;
    const double pdf = std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
    const double cdf = 0.5 * std::erfc(-a / std::sqrt(2.0));
    return mu * cdf + sigma * pdf;
}

// Deterministic part of a trial once noise is removed: the overshoot is the
// clipped mean and the correction time follows it.
double noiseless_time(const ExpectedTrial& e) {
    return e.timed_out ? e.time_ms : e.time_ms + 40.0 * std::max(0.0, e.overshoot_mean_cm);
}

}  // namespace

TEST_CASE("haptic benefit") {
    CHECK(haptic_benefit(5, 2.6) == 1.0);
    CHECK(haptic_benefit(-5, 2.6) == 0.0);
    CHECK(haptic_benefit(10, 0.65) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(haptic_benefit(15, 1.0) == 0.0);
    CHECK_THROWS_AS(haptic_benefit(16, 1.0), Error);
    CHECK_THROWS_AS(haptic_benefit(5, 2.7), Error);
}

TEST_CASE("expected trial hand example") {
    const auto e = expected_trial({0.5, 0.3, 5, 2.6}, {30, 0, 1.0, 4.0}, SkillProfile{});
    CHECK_FALSE(e.timed_out);
    CHECK(e.time_ms == doctest::Approx(1067.4).epsilon(1e-4));
    const double r = inverse_transfer(1.0, 0.5, 0.3);
    const double mt = 250.0 + 150.0 * std::log2(r * 70.0 / (4.0 / gain(r, 0.5, 0.3)) + 1.0);
    CHECK(e.time_ms == doctest::Approx(mt + 150.0).epsilon(1e-12));
}

TEST_CASE("unreachable targets time out") {
    for (double d : {1.5, 2.0}) {
        const auto e = expected_trial({0.3, 0.0, 5, 1}, {45, 90, d, 3}, SkillProfile{});
        CHECK(e.timed_out);
        CHECK(e.time_ms == 3000.0);
        CHECK(e.overshoot_mean_cm == 0.0);
        Rng rng(1);
        const auto t = simulate_trial({0.3, 0.0, 5, 1}, {45, 90, d, 3}, SkillProfile{}, rng);
        CHECK(t.timed_out);
        CHECK(t.max_overshoot_cm == 0.0);
    }
}

TEST_CASE("no haptics means the full verification phase") {
    const TargetSpec target{30, 0, 1.0, 4.0};
    const auto with = expected_trial({0.5, 0.3, 5, 0}, target, SkillProfile{});
    const auto base = expected_trial({0.5, 0.3, -5, 2.6}, target, SkillProfile{});
    CHECK(with.time_ms == base.time_ms);
    CHECK(with.time_ms - expected_trial({0.5, 0.3, 5, 2.6}, target, SkillProfile{}).time_ms == doctest::Approx(150.0));
}

TEST_CASE("zero-noise trial reproduces the expected trial") {
    const SkillProfile skill;
    for (const auto& target : full_variation_set()) {
        const DesignParams design{0.2, 0.4, 3, 2};
        const auto e = expected_trial(design, target, skill);
        Rng rng(5);
        const auto t = simulate_trial(design, target, skill, rng, Noise::Off);
        CHECK(t.completion_time_ms == noiseless_time(e));
        CHECK(t.max_overshoot_cm == (e.timed_out ? 0.0 : std::max(0.0, e.overshoot_mean_cm)));
    }
}

TEST_CASE("trials are reproducible per stream") {
    const DesignParams design{0.1, 0.2, 0, 1};
    const TargetSpec target{60, 270, 1.0, 3};
    Rng a = Rng::stream({3, 4, 5});
    Rng b = Rng::stream({3, 4, 5});
    const auto ta = simulate_trial(design, target, SkillProfile{}, a);
    const auto tb = simulate_trial(design, target, SkillProfile{}, b);
    CHECK(ta.completion_time_ms == tb.completion_time_ms);
    CHECK(ta.max_overshoot_cm == tb.max_overshoot_cm);
}

TEST_CASE("overshoot mean matches the truncated normal") {
    // beta = 1/3 (G = 5 + 20/3, A = 2.6), linear region (g = 1), width 5 cm:
    // mu = m0 (1 - 0.7/3) - 0.5 = -0.25 and sigma = s0 (1 - 0.5/3) = 0.5.
    SkillProfile skill;
    skill.s0_cm = 0.6;
    skill.m0_cm = 0.25 / (1.0 - 0.7 / 3.0);
    skill.validate();
    const DesignParams design{1.0, 0.0, 5.0 + 20.0 / 3.0, 2.6};
    const TargetSpec target{30, 0, 0.5, 5.0};
    const auto e = expected_trial(design, target, skill);
    REQUIRE(e.overshoot_mean_cm == doctest::Approx(-0.25).epsilon(1e-12));
    REQUIRE(e.overshoot_sd_cm == doctest::Approx(0.5).epsilon(1e-12));

    double sum = 0.0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        Rng rng = Rng::stream({99, i});
        sum += simulate_trial(design, target, skill, rng).max_overshoot_cm;
    }
    CHECK(std::abs(sum / 10000.0 - truncated_normal_mean(-0.25, 0.5)) < 0.02);
}

TEST_CASE("simulate evaluation is deterministic") {
    SkillProfile skill = SkillProfile::sample(17);
    const DesignParams design{0.3, 0.35, 4, 2};
    CHECK(simulate_evaluation(design, skill, 123) == simulate_evaluation(design, skill, 123));
    CHECK(simulate_evaluation(design, skill, 123).trial_count == 36);
}

TEST_CASE("zero-noise linear design averages the expected trial times") {
    const SkillProfile skill;
    const DesignParams design{0.4, 0.0, 8, 1.5};
    const std::uint64_t block_seed = 77;
    double total = 0.0;
    for (const auto& t : generate_trial_block(block_seed)) total += noiseless_time(expected_trial(design, t, skill));
    const auto e = simulate_evaluation(design, skill, block_seed, Noise::Off);
    CHECK(e.mean_time_ms == doctest::Approx(total / 36.0).epsilon(1e-12));
}

TEST_CASE("more amplitude at the best gap never slows a zero-noise evaluation") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const SkillProfile skill = SkillProfile::sample(seed);
        const auto quiet = simulate_evaluation({0.5, 0.25, 5, 0}, skill, seed, Noise::Off);
        const auto loud = simulate_evaluation({0.5, 0.25, 5, 2.6}, skill, seed, Noise::Off);
        CHECK(loud.mean_time_ms <= quiet.mean_time_ms);
    }
}

TEST_CASE("expected time grows with distance in the reachable regime") {
    Rng rng(8);
    for (int i = 0; i < 20; ++i) {
        const DesignParams design = decode_unit(UnitPoint(rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()));
        const SkillProfile skill = SkillProfile::sample(i);
        for (double inc : kInclinationsDeg)
            for (double w : kWidthsCm) {
                double previous = 0.0;
                for (double d : kDistancesUnits) {
                    const auto e = expected_trial(design, {inc, 0, d, w}, skill);
                    if (e.timed_out) break;
                    CHECK(e.time_ms > previous);
                    previous = e.time_ms;
                }
            }
    }
}

TEST_CASE("zero-noise mean times are plausible") {
    Rng rng(21);
    for (int i = 0; i < 100; ++i) {
        const DesignParams design = decode_unit(UnitPoint(rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()));
        const auto e = simulate_evaluation(design, SkillProfile::sample(1000 + i), i, Noise::Off);
        CHECK(e.mean_time_ms >= 500.0);
        CHECK(e.mean_time_ms <= 3000.0);
    }
}

TEST_CASE("skill profiles") {
    for (std::uint64_t s = 0; s < 100; ++s) CHECK_NOTHROW(SkillProfile::sample(s).validate());
    SkillProfile bad;
    bad.a_ms = 300;
    CHECK_THROWS_AS(bad.validate(), Error);
}

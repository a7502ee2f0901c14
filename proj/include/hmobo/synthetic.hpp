#pragma once

#include <cstdint>

#include <nlohmann/json_fwd.hpp>

#include "hmobo/design_domain.hpp"
#include "hmobo/evaluation.hpp"
#include "hmobo/random.hpp"
#include "hmobo/transfer.hpp"

// Seeded stand-in for a participant performing pointing trials. The model is a
// Fitts-style movement time on the gain-shrunk target width, a verification
// phase shortened by haptic cueing, and a truncated-normal overshoot that grows
// with control-display gain. None of the constants below are measured.

namespace hmobo {

namespace oracle {
inline constexpr double kTimeoutMs = 3000.0;
inline constexpr double kVerifyBaselineMs = 300.0;
inline constexpr double kVerifyHapticReduction = 0.5;
inline constexpr double kOvershootHapticReduction = 0.7;
inline constexpr double kSpreadHapticReduction = 0.5;
inline constexpr double kWidthSlack = 0.1;           // cm of overshoot absorbed per cm of width
inline constexpr double kMinEffectiveWidthCm = 0.1;
inline constexpr double kTimeNoiseSdMs = 50.0;
inline constexpr double kMinTrialTimeMs = 200.0;
inline constexpr double kCorrectionMsPerCm = 40.0;
inline constexpr double kBestGapCm = 5.0;
inline constexpr double kGapToleranceCm = 10.0;
inline constexpr double kMaxAmplitudeG = 2.6;
}  // namespace oracle

struct SkillProfile {
    double a_ms = 250.0;
    double b_ms_per_bit = 150.0;
    double m0_cm = 0.4;
    double s0_cm = 0.5;
    double arm_cm = 70.0;
    double r_max = kDefaultReachCap;
    std::uint64_t seed = 0;

    /// Throws ErrorKind::Config when a field leaves its plausible range.
    void validate() const;
    /// Draws a profile uniformly from the plausible ranges.
    static SkillProfile sample(std::uint64_t seed);
};

void to_json(nlohmann::json& j, const SkillProfile& s);
void from_json(const nlohmann::json& j, SkillProfile& s);

enum class Noise { On, Off };

/// Haptic benefit in [0, 1]: triangular in the gap around 5 cm, sqrt in amplitude.
double haptic_benefit(double gap_cm, double amplitude_g);

struct ExpectedTrial {
    double time_ms = 0.0;
    double overshoot_mean_cm = 0.0;
    double overshoot_sd_cm = 0.0;
    double gain = 1.0;
    bool timed_out = false;
};

ExpectedTrial expected_trial(const DesignParams& design, const TargetSpec& target, const SkillProfile& skill);

/// One noisy trial drawn from `stream`. Callers derive the stream from
/// (skill seed, block seed, trial index) so trials are individually reproducible.
TrialOutcome simulate_trial(const DesignParams& design, const TargetSpec& target, const SkillProfile& skill, Rng& stream,
                            Noise noise = Noise::On);

/// 36-trial formal evaluation over generate_trial_block(block_seed).
EvaluationResult simulate_evaluation(const DesignParams& design, const SkillProfile& skill, std::uint64_t block_seed,
                                     Noise noise = Noise::On);

}  // namespace hmobo

#include "hmobo/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hmobo/error.hpp"

namespace hmobo {

namespace {

struct Range {
    double lo;
    double hi;
};

constexpr Range kInterceptRange{225.0, 275.0};
constexpr Range kSlopeRange{135.0, 165.0};
constexpr Range kOvershootMeanRange{0.32, 0.48};
constexpr Range kOvershootSpreadRange{0.4, 0.6};

void require_in(double v, Range r, const char* name) {
    if (!(v >= r.lo && v <= r.hi)) {
        fail(ErrorKind::Config, std::string("skill.") + name + "=" + std::to_string(v) + " outside [" +
                                    std::to_string(r.lo) + ", " + std::to_string(r.hi) + "]");
    }
}

}  // namespace

void SkillProfile::validate() const {
    require_in(a_ms, kInterceptRange, "a_ms");
    require_in(b_ms_per_bit, kSlopeRange, "b_ms_per_bit");
    require_in(m0_cm, kOvershootMeanRange, "m0_cm");
    require_in(s0_cm, kOvershootSpreadRange, "s0_cm");
    if (!(arm_cm > 0.0)) fail(ErrorKind::Config, "skill.arm_cm must be positive");
    if (!(r_max >= 1.0)) fail(ErrorKind::Config, "skill.r_max must be >= 1");
}

SkillProfile SkillProfile::sample(std::uint64_t seed) {
    Rng rng = Rng::stream({seed, 0x736B696CULL});
    auto draw = [&](Range r) { return r.lo + rng.uniform() * (r.hi - r.lo); };
    SkillProfile s;
    s.a_ms = draw(kInterceptRange);
    s.b_ms_per_bit = draw(kSlopeRange);
    s.m0_cm = draw(kOvershootMeanRange);
    s.s0_cm = draw(kOvershootSpreadRange);
    s.seed = seed;
    return s;
}

void to_json(nlohmann::json& j, const SkillProfile& s) {
    j = nlohmann::json{{"a_ms", s.a_ms},     {"b_ms_per_bit", s.b_ms_per_bit}, {"m0_cm", s.m0_cm},
                       {"s0_cm", s.s0_cm},   {"arm_cm", s.arm_cm},             {"r_max", s.r_max},
                       {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, SkillProfile& s) {
    if (!j.is_object()) fail(ErrorKind::Config, "skill config must be an object");
    try {
        s.a_ms = j.value("a_ms", s.a_ms);
        s.b_ms_per_bit = j.value("b_ms_per_bit", s.b_ms_per_bit);
        s.m0_cm = j.value("m0_cm", s.m0_cm);
        s.s0_cm = j.value("s0_cm", s.s0_cm);
        s.arm_cm = j.value("arm_cm", s.arm_cm);
        s.r_max = j.value("r_max", s.r_max);
        s.seed = j.value("seed", s.seed);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Config, std::string("skill config: ") + e.what());
    }
    s.validate();
}

double haptic_benefit(double gap_cm, double amplitude_g) {
    const auto& G = ParamRanges::defaults().bounds[2];
    const auto& A = ParamRanges::defaults().bounds[3];
    if (!(gap_cm >= G.lo && gap_cm <= G.hi)) fail(ErrorKind::Domain, "haptic_benefit: gap outside [-5, 15] cm");
    if (!(amplitude_g >= A.lo && amplitude_g <= A.hi)) fail(ErrorKind::Domain, "haptic_benefit: amplitude outside [0, 2.6] g");
    const double timing = std::max(0.0, 1.0 - std::abs(gap_cm - oracle::kBestGapCm) / oracle::kGapToleranceCm);
    return timing * std::sqrt(amplitude_g / oracle::kMaxAmplitudeG);
}

ExpectedTrial expected_trial(const DesignParams& design, const TargetSpec& target, const SkillProfile& skill) {
    validate(design);
    const double r_req = inverse_transfer(target.distance_units, design.D, design.k);
    if (r_req > skill.r_max) {
        return {oracle::kTimeoutMs, 0.0, 0.0, gain(skill.r_max, design.D, design.k), true};
    }
    const double g = gain(r_req, design.D, design.k);
    const double effective_width = std::max(target.width_cm / g, oracle::kMinEffectiveWidthCm);
    const double index_of_difficulty = std::log2(r_req * skill.arm_cm / effective_width + 1.0);
    const double movement = skill.a_ms + skill.b_ms_per_bit * index_of_difficulty;
    const double beta = haptic_benefit(design.G, design.A);
    const double verify = oracle::kVerifyBaselineMs * (1.0 - oracle::kVerifyHapticReduction * beta);

    ExpectedTrial out;
    out.time_ms = movement + verify;
    out.overshoot_mean_cm = skill.m0_cm * g * (1.0 - oracle::kOvershootHapticReduction * beta) - oracle::kWidthSlack * target.width_cm;
    out.overshoot_sd_cm = skill.s0_cm * g * (1.0 - oracle::kSpreadHapticReduction * beta);
    out.gain = g;
    return out;
}

TrialOutcome simulate_trial(const DesignParams& design, const TargetSpec& target, const SkillProfile& skill, Rng& stream,
                            Noise noise) {
    const ExpectedTrial e = expected_trial(design, target, skill);
    if (e.timed_out) return {e.time_ms, 0.0, true};
    // Both draws are consumed even in noiseless mode so stream positions line up.
    const double time_z = stream.normal();
    const double overshoot_z = stream.normal();
    const bool noisy = noise == Noise::On;
    double time = e.time_ms + (noisy ? oracle::kTimeNoiseSdMs * time_z : 0.0);
    time = std::max(time, oracle::kMinTrialTimeMs);
    const double overshoot = std::max(0.0, e.overshoot_mean_cm + (noisy ? e.overshoot_sd_cm * overshoot_z : 0.0));
    time += oracle::kCorrectionMsPerCm * overshoot;
    return {time, overshoot, false};
}

EvaluationResult simulate_evaluation(const DesignParams& design, const SkillProfile& skill, std::uint64_t block_seed,
                                     Noise noise) {
    const auto block = generate_trial_block(block_seed);
    std::vector<TrialOutcome> trials;
    trials.reserve(block.size());
    for (std::size_t i = 0; i < block.size(); ++i) {
        Rng stream = Rng::stream({skill.seed, block_seed, i});
        trials.push_back(simulate_trial(design, block[i], skill, stream, noise));
    }
    return aggregate_evaluation(design, trials);
}

}  // namespace hmobo

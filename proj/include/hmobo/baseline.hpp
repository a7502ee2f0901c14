#pragma once

#include <cstdint>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "hmobo/session.hpp"
#include "hmobo/synthetic.hpp"

namespace hmobo {

enum class StrategyKind { RandomExplorer, FixatedHillClimber };

std::string_view to_string(StrategyKind k);
StrategyKind strategy_kind_from_string(std::string_view s);

/// Designer-led caricatures: an unbiased random explorer and a hill climber
/// that perturbs its incumbent and scalarizes toward speed.
struct StrategyConfig {
    StrategyKind kind = StrategyKind::FixatedHillClimber;
    int budget_evaluations = 12;
    double step_sigma = 0.05;
    double speed_weight = 0.7;

    void validate() const;
};

void to_json(nlohmann::json& j, const StrategyConfig& s);
void from_json(const nlohmann::json& j, StrategyConfig& s);

/// A designer-led session whose every design is formally evaluated with the
/// synthetic participant. Pure function of (strategy, skill, seed).
Session run_baseline_session(const StrategyConfig& strategy, const SkillProfile& skill, std::uint64_t seed);

}  // namespace hmobo

#include "hmobo/baseline.hpp"

#include <algorithm>
#include <string>

#include <nlohmann/json.hpp>

#include "hmobo/error.hpp"

namespace hmobo {

std::string_view to_string(StrategyKind k) {
    return k == StrategyKind::RandomExplorer ? "random_explorer" : "fixated_hill_climber";
}

StrategyKind strategy_kind_from_string(std::string_view s) {
    if (s == "random_explorer" || s == "random") return StrategyKind::RandomExplorer;
    if (s == "fixated_hill_climber" || s == "fixated") return StrategyKind::FixatedHillClimber;
    fail(ErrorKind::Config, "unknown strategy '" + std::string(s) + "'");
}

void StrategyConfig::validate() const {
    if (budget_evaluations < 1) fail(ErrorKind::Config, "strategy budget must be >= 1");
    if (!(step_sigma > 0.0)) fail(ErrorKind::Config, "strategy step_sigma must be positive");
    if (!(speed_weight >= 0.0 && speed_weight <= 1.0)) fail(ErrorKind::Config, "strategy weight must lie in [0, 1]");
}

void to_json(nlohmann::json& j, const StrategyConfig& s) {
    j = nlohmann::json{{"kind", to_string(s.kind)},
                       {"budget_evaluations", s.budget_evaluations},
                       {"step_sigma", s.step_sigma},
                       {"scalarization_weight", s.speed_weight}};
}

void from_json(const nlohmann::json& j, StrategyConfig& s) {
    if (!j.is_object()) fail(ErrorKind::Config, "strategy config must be an object");
    try {
        if (j.contains("kind")) s.kind = strategy_kind_from_string(j.at("kind").get<std::string>());
        s.budget_evaluations = j.value("budget_evaluations", s.budget_evaluations);
        s.step_sigma = j.value("step_sigma", s.step_sigma);
        s.speed_weight = j.value("scalarization_weight", s.speed_weight);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Config, std::string("strategy config: ") + e.what());
    }
    s.validate();
}

Session run_baseline_session(const StrategyConfig& strategy, const SkillProfile& skill, std::uint64_t seed) {
    strategy.validate();
    SessionConfig cfg;
    cfg.mobo.seed = seed;
    cfg.skill = skill;
    Session session = Session::create("baseline-" + std::string(to_string(strategy.kind)) + "-" + std::to_string(seed),
                                      Mode::DesignerLed, cfg, counting_clock());
    Rng rng = Rng::stream({seed, 0x62617365ULL});
    auto uniform_point = [&] {
        UnitPoint u;
        for (int d = 0; d < kDesignDims; ++d) u[d] = rng.uniform();
        return u;
    };
    auto score = [&](const EvaluationResult& e) { return strategy.speed_weight * e.speed + (1.0 - strategy.speed_weight) * e.accuracy; };

    if (strategy.kind == StrategyKind::RandomExplorer) {
        for (int i = 0; i < strategy.budget_evaluations; ++i) {
            session.submit_evaluation(decode_unit(uniform_point()), EvaluationSource::Synthetic);
        }
        return session;
    }

    UnitPoint incumbent = uniform_point();
    double incumbent_score = score(session.submit_evaluation(decode_unit(incumbent), EvaluationSource::Synthetic));
    for (int i = 1; i < strategy.budget_evaluations; ++i) {
        UnitPoint candidate = incumbent;
        for (int d = 0; d < kDesignDims; ++d) {
            candidate[d] = std::clamp(candidate[d] + strategy.step_sigma * rng.normal(), 0.0, 1.0);
        }
        const double s = score(session.submit_evaluation(decode_unit(candidate), EvaluationSource::Synthetic));
        if (s > incumbent_score) {
            incumbent = candidate;
            incumbent_score = s;
        }
    }
    return session;
}

}  // namespace hmobo

#include <doctest.h>

#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "hmobo/analysis.hpp"
#include "hmobo/baseline.hpp"
#include "hmobo/error.hpp"

using namespace hmobo;

namespace {

std::vector<UnitPoint> evaluated_points(const SessionState& s) {
    std::vector<UnitPoint> out;
    for (const auto& e : s.evaluations) out.push_back(encode_unit(e.design));
    return out;
}

double score(const EvaluationResult& e, double w) { return w * e.speed + (1 - w) * e.accuracy; }

}  // namespace

TEST_CASE("budget of one gives one evaluation") {
    for (auto kind : {StrategyKind::RandomExplorer, StrategyKind::FixatedHillClimber}) {
        StrategyConfig cfg;
        cfg.kind = kind;
        cfg.budget_evaluations = 1;
        const auto s = run_baseline_session(cfg, SkillProfile::sample(1), 1);
        CHECK(s.state().evaluations.size() == 1);
        CHECK(s.state().mode == Mode::DesignerLed);
    }
}

TEST_CASE("a vanishing step keeps the climber at its start") {
    StrategyConfig cfg;
    cfg.step_sigma = 1e-300;
    const auto s = run_baseline_session(cfg, SkillProfile::sample(2), 2);
    const auto pts = evaluated_points(s.state());
    REQUIRE(pts.size() == 12);
    for (const auto& p : pts) CHECK((p - pts[0]).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("the climber only moves from its incumbent after an improvement") {
    const StrategyConfig cfg;
    const auto s = run_baseline_session(cfg, SkillProfile::sample(3), 3);
    const auto& ev = s.state().evaluations;
    std::size_t incumbent = 0;
    for (std::size_t i = 1; i < ev.size(); ++i) {
        // Each proposal is a perturbation of the incumbent, so it lies within a few sigma of it.
        const double step = (encode_unit(ev[i].design) - encode_unit(ev[incumbent].design)).cwiseAbs().maxCoeff();
        CHECK(step < 6 * cfg.step_sigma);
        if (score(ev[i], cfg.speed_weight) > score(ev[incumbent], cfg.speed_weight)) incumbent = i;
    }
}

TEST_CASE("random explorer m=2 coverage matches the occupancy oracle") {
    // Twelve uniform points in 16 equiprobable cells occupy 16 (1 - (15/16)^12) cells on average.
    const double oracle = 16.0 * (1.0 - std::pow(15.0 / 16.0, 12));
    StrategyConfig cfg;
    cfg.kind = StrategyKind::RandomExplorer;
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto s = run_baseline_session(cfg, SkillProfile::sample(seed), seed);
        total += hypercube_coverage(evaluated_points(s.state()), 2).covered;
    }
    CHECK(std::abs(total / 200.0 - oracle) < 0.25);
}

TEST_CASE("baseline sessions are pure functions of their inputs and replay exactly") {
    const StrategyConfig cfg;
    const auto skill = SkillProfile::sample(4);
    const auto a = run_baseline_session(cfg, skill, 4);
    const auto b = run_baseline_session(cfg, skill, 4);
    CHECK(to_json(a.state()).dump() == to_json(b.state()).dump());
    CHECK(to_json(replay(a.log())).dump() == to_json(a.state()).dump());
}

TEST_CASE("strategy config") {
    StrategyConfig cfg;
    cfg.speed_weight = 1.5;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.budget_evaluations = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    CHECK(strategy_kind_from_string("random") == StrategyKind::RandomExplorer);
    CHECK(strategy_kind_from_string("fixated_hill_climber") == StrategyKind::FixatedHillClimber);
    const nlohmann::json j = StrategyConfig{};
    CHECK(j.at("scalarization_weight") == 0.7);
    CHECK(j.get<StrategyConfig>().budget_evaluations == 12);
}

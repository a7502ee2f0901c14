#include <doctest.h>

#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "hmobo/error.hpp"
#include "hmobo/session.hpp"

using namespace hmobo;

namespace {

SessionConfig quick_config(int n_init = 4, int n_total = 8) {
    SessionConfig cfg;
    cfg.mobo.n_init = n_init;
    cfg.mobo.n_total = n_total;
    cfg.mobo.mc_samples = 64;
    cfg.mobo.raw_candidates = 128;
    cfg.mobo.gp_restarts = 2;
    cfg.mobo.seed = 5;
    cfg.skill = SkillProfile::sample(5);
    return cfg;
}

Session run_to_decision(const SessionConfig& cfg) {
    auto s = Session::create("opt", Mode::OptimizerDriven, cfg, counting_clock());
    while (s.state().stage == Stage::Design) {
        const auto p = s.get_proposal();
        s.submit_evaluation(p.design, EvaluationSource::Synthetic);
    }
    return s;
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Io;
}

}  // namespace

TEST_CASE("create records the configuration") {
    auto s = Session::create("a", Mode::OptimizerDriven, SessionConfig{}, counting_clock());
    CHECK(s.state().cfg.mobo.n_total == 40);
    CHECK(s.state().cfg.mobo.n_init == 10);
    CHECK(s.state().stage == Stage::Design);
    CHECK(s.log().size() == 1);
    CHECK(s.log()[0].type == EventType::SessionCreated);
    auto d = Session::create("b", Mode::DesignerLed, SessionConfig{}, counting_clock());
    CHECK_FALSE(d.state().pending_proposal.has_value());
    CHECK(kind_of([&] { d.get_proposal(); }) == ErrorKind::Mode);
}

TEST_CASE("proposal sequencing") {
    auto s = Session::create("a", Mode::OptimizerDriven, quick_config(), counting_clock());
    const auto p = s.get_proposal();
    CHECK(p.tag == ProposalTag::Seed);
    CHECK(kind_of([&] { s.get_proposal(); }) == ErrorKind::Sequencing);
    DesignParams other = p.design;
    other.A = other.A > 1 ? 0.5 : 2.0;
    CHECK(kind_of([&] { s.submit_evaluation(other, EvaluationSource::Synthetic); }) == ErrorKind::Protocol);
    s.submit_evaluation(p.design, EvaluationSource::Synthetic);
    CHECK(kind_of([&] { s.submit_evaluation(p.design, EvaluationSource::Synthetic); }) == ErrorKind::Protocol);
}

TEST_CASE("optimizer session walks through seed, acquisition and decision") {
    const auto cfg = quick_config();
    auto s = run_to_decision(cfg);
    const auto& st = s.state();
    CHECK(st.stage == Stage::Decision);
    CHECK(st.evaluations.size() == 8);
    REQUIRE(st.proposal_tags.size() == 8);
    for (int i = 0; i < 8; ++i) CHECK(st.proposal_tags[i] == (i < 4 ? ProposalTag::Seed : ProposalTag::Acquisition));
    CHECK(kind_of([&] { s.get_proposal(); }) == ErrorKind::Stage);
    CHECK(kind_of([&] { s.submit_evaluation(st.evaluations[0].design, EvaluationSource::Synthetic); }) == ErrorKind::Stage);

    const auto view = s.get_pareto();
    std::size_t dominated = st.evaluations.size();
    for (std::size_t i = 0; i < view.points.size(); ++i)
        if (std::find(view.front.begin(), view.front.end(), i) == view.front.end()) dominated = i;
    if (dominated < st.evaluations.size()) {
        const std::vector<std::size_t> bad{view.front[0], dominated, view.front[0]};
        CHECK(kind_of([&] { s.submit_decision(bad); }) == ErrorKind::InvalidSelection);
    }
    const std::vector<std::size_t> picks{view.front[0], view.front.back(), view.front[0]};
    const auto report = s.submit_decision(picks);
    CHECK(s.state().stage == Stage::Complete);
    CHECK(report.at("coverage").size() == 4);
    CHECK(kind_of([&] { s.submit_decision(picks); }) == ErrorKind::Stage);
    CHECK(kind_of([&] { s.get_proposal(); }) == ErrorKind::Stage);
}

TEST_CASE("decision before the last evaluation is a stage error") {
    auto s = Session::create("a", Mode::OptimizerDriven, quick_config(), counting_clock());
    const auto p = s.get_proposal();
    s.submit_evaluation(p.design, EvaluationSource::Synthetic);
    const std::vector<std::size_t> picks{0, 0, 0};
    CHECK(kind_of([&] { s.submit_decision(picks); }) == ErrorKind::Stage);
}

TEST_CASE("manual metrics map through the affine objectives") {
    auto s = Session::create("m", Mode::DesignerLed, SessionConfig{}, counting_clock());
    const auto e = s.submit_evaluation({0.7, 0.1, 0, 2}, EvaluationSource::Manual, std::pair{1250.0, 0.5});
    CHECK(e.speed == 0.0);
    CHECK(e.accuracy == 0.0);
    CHECK(kind_of([&] { s.submit_evaluation({0.7, 0.1, 0, 2}, EvaluationSource::Manual); }) == ErrorKind::Validation);
    CHECK(kind_of([&] { s.submit_evaluation({0.7, 0.1, 0, 2}, EvaluationSource::Manual, std::pair{-1.0, 0.5}); }) ==
          ErrorKind::Validation);
    CHECK(kind_of([&] { s.submit_evaluation({0.7, 0.9, 0, 2}, EvaluationSource::Manual, std::pair{1000.0, 0.5}); }) ==
          ErrorKind::Range);
}

TEST_CASE("designer-led informal tests") {
    auto s = Session::create("d", Mode::DesignerLed, SessionConfig{}, counting_clock());
    std::vector<DesignParams> tried;
    for (int i = 0; i < 259; ++i) {
        const DesignParams p{i / 258.0, 0.25, 5, 1.3};
        s.record_informal_test(p);
        tried.push_back(p);
    }
    CHECK(s.state().informal_tests == tried);
    CHECK(replay(s.log()).informal_tests == tried);
    auto o = Session::create("o", Mode::OptimizerDriven, SessionConfig{}, counting_clock());
    CHECK(kind_of([&] { o.record_informal_test({0, 0, 0, 0}); }) == ErrorKind::Mode);
}

TEST_CASE("designer-led decision accepts any evaluated design") {
    auto s = Session::create("d", Mode::DesignerLed, quick_config(), counting_clock());
    const std::vector<std::size_t> none{0, 0, 0};
    CHECK(kind_of([&] { s.submit_decision(none); }) == ErrorKind::EmptyData);
    CHECK(kind_of([&] { s.get_pareto(); }) == ErrorKind::EmptyData);
    s.submit_evaluation({0.1, 0.1, 5, 2.6}, EvaluationSource::Manual, std::pair{1000.0, 0.1});
    s.submit_evaluation({0.9, 0.1, 5, 2.6}, EvaluationSource::Manual, std::pair{1500.0, 0.9});
    CHECK(s.get_pareto().front == std::vector<std::size_t>{0});
    const std::vector<std::size_t> picks{1, 1, 0};
    CHECK_NOTHROW(s.submit_decision(picks));
}

TEST_CASE("repeated picks are allowed") {
    auto cfg = quick_config(2, 3);
    auto s = Session::create("one", Mode::OptimizerDriven, cfg, counting_clock());
    for (int i = 0; i < 3; ++i) s.submit_evaluation(s.get_proposal().design, EvaluationSource::Synthetic);
    const auto front = s.get_pareto().front;
    const std::vector<std::size_t> triple{front[0], front[0], front[0]};
    CHECK_NOTHROW(s.submit_decision(triple));
}

TEST_CASE("replay reproduces state byte for byte, and every prefix is valid") {
    auto s = run_to_decision(quick_config());
    const auto view = s.get_pareto();
    const std::vector<std::size_t> picks{view.front[0], view.front[0], view.front[0]};
    s.submit_decision(picks);
    CHECK(to_json(replay(s.log())).dump() == to_json(s.state()).dump());
    for (std::size_t n = 1; n <= s.log().size(); ++n) {
        const auto prefix = std::span(s.log()).first(n);
        CHECK_NOTHROW(replay(prefix));
    }
}

TEST_CASE("log text roundtrip") {
    auto s = run_to_decision(quick_config(2, 3));
    std::stringstream out;
    write_log(out, s.log());
    const std::string text = out.str();
    std::stringstream in(text);
    const auto back = read_log(in);
    std::stringstream again;
    write_log(again, back);
    CHECK(again.str() == text);
    CHECK(to_json(replay(back)).dump() == to_json(s.state()).dump());
    auto restored = Session::restore(back, counting_clock());
    CHECK(to_json(restored.state()).dump() == to_json(s.state()).dump());
}

TEST_CASE("corrupt logs are rejected") {
    CHECK(kind_of([] { replay({}); }) == ErrorKind::CorruptLog);

    auto s = Session::create("c", Mode::DesignerLed, SessionConfig{}, counting_clock());
    s.record_informal_test({0.5, 0.1, 0, 1});
    s.record_informal_test({0.6, 0.1, 0, 1});
    auto log = s.log();

    auto gap = log;
    gap.erase(gap.begin() + 1);
    CHECK(kind_of([&] { replay(gap); }) == ErrorKind::CorruptLog);

    auto headless = std::vector<Event>(log.begin() + 1, log.end());
    for (auto& e : headless) --e.seq;
    CHECK(kind_of([&] { replay(headless); }) == ErrorKind::CorruptLog);

    auto bad_payload = log;
    bad_payload[1].payload = nlohmann::json{{"design", "nope"}};
    CHECK(kind_of([&] { replay(bad_payload); }) == ErrorKind::CorruptLog);

    std::stringstream text;
    write_log(text, log);
    std::string broken = text.str() + "{not json\n";
    std::stringstream in(broken);
    try {
        read_log(in);
        FAIL("expected corrupt log");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::CorruptLog);
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
}

TEST_CASE("events serialize canonically") {
    const Event e{3, "2024-01-01T00:00:00.000Z", EventType::DesignTested, nlohmann::json{{"design", DesignParams{0.5, 0.1, 0, 1}}}};
    const std::string text = serialize_event(e);
    CHECK(text.find('\n') == std::string::npos);
    CHECK(serialize_event(event_from_json(nlohmann::json::parse(text))) == text);
    CHECK(text.find("\"at\"") < text.find("\"payload\""));
}

TEST_CASE("counting clock is deterministic") {
    auto a = counting_clock();
    auto b = counting_clock();
    for (int i = 0; i < 5; ++i) CHECK(a() == b());
    CHECK(a() != a());
}

#include "hmobo/session.hpp"

#include <chrono>
#include <ctime>
#include <istream>
#include <memory>
#include <ostream>
#include <string>

#include "hmobo/analysis.hpp"
#include "hmobo/error.hpp"

namespace hmobo {

using nlohmann::json;

std::string_view to_string(Mode m) { return m == Mode::DesignerLed ? "designer_led" : "optimizer_driven"; }

std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::Design: return "design";
        case Stage::Decision: return "decision";
        case Stage::Complete: return "complete";
    }
    return "design";
}

std::string_view to_string(EvaluationSource s) { return s == EvaluationSource::Synthetic ? "synthetic" : "manual"; }

std::string_view to_string(EventType t) {
    switch (t) {
        case EventType::SessionCreated: return "session_created";
        case EventType::DesignTested: return "design_tested";
        case EventType::ProposalIssued: return "proposal_issued";
        case EventType::EvaluationCompleted: return "evaluation_completed";
        case EventType::DecisionMade: return "decision_made";
    }
    return "session_created";
}

Mode mode_from_string(std::string_view s) {
    if (s == "designer_led") return Mode::DesignerLed;
    if (s == "optimizer_driven") return Mode::OptimizerDriven;
    fail(ErrorKind::Validation, "unknown mode '" + std::string(s) + "'");
}

EvaluationSource source_from_string(std::string_view s) {
    if (s == "synthetic") return EvaluationSource::Synthetic;
    if (s == "manual") return EvaluationSource::Manual;
    fail(ErrorKind::Validation, "unknown evaluation source '" + std::string(s) + "'");
}

EventType event_type_from_string(std::string_view s) {
    for (auto t : {EventType::SessionCreated, EventType::DesignTested, EventType::ProposalIssued,
                   EventType::EvaluationCompleted, EventType::DecisionMade}) {
        if (to_string(t) == s) return t;
    }
    fail(ErrorKind::CorruptLog, "unknown event type '" + std::string(s) + "'");
}

void to_json(json& j, const SessionConfig& c) { j = json{{"mobo", c.mobo}, {"skill", c.skill}}; }

void from_json(const json& j, SessionConfig& c) {
    if (!j.is_object()) fail(ErrorKind::Config, "config must be a JSON object");
    if (j.contains("mobo")) c.mobo = j.at("mobo").get<MoboConfig>();
    if (j.contains("skill")) c.skill = j.at("skill").get<SkillProfile>();
    c.mobo.validate();
    c.skill.validate();
}

json to_json(const SessionState& s) {
    json evaluations = json::array();
    for (std::size_t i = 0; i < s.evaluations.size(); ++i) {
        json e = s.evaluations[i];
        e["source"] = to_string(s.evaluation_sources[i]);
        evaluations.push_back(std::move(e));
    }
    json tags = json::array();
    for (auto t : s.proposal_tags) tags.push_back(to_string(t));
    json j{{"id", s.id},
           {"mode", to_string(s.mode)},
           {"stage", to_string(s.stage)},
           {"evaluations", std::move(evaluations)},
           {"informal_tests", s.informal_tests},
           {"proposal_tags", std::move(tags)},
           {"cfg", s.cfg},
           {"created_at", s.created_at},
           {"last_seq", s.last_seq}};
    j["pending_proposal"] = s.pending_proposal
                                ? json{{"design", s.pending_proposal->design}, {"tag", to_string(s.pending_proposal->tag)}}
                                : json(nullptr);
    j["picks"] = s.picks ? json(*s.picks) : json(nullptr);
    return j;
}

json to_json(const Event& e) {
    return json{{"seq", e.seq}, {"at", e.at}, {"type", to_string(e.type)}, {"payload", e.payload}};
}

Event event_from_json(const json& j) {
    if (!j.is_object() || !j.contains("seq") || !j.contains("type") || !j.contains("payload"))
        fail(ErrorKind::CorruptLog, "event is missing seq, type or payload");
    Event e;
    try {
        e.seq = j.at("seq").get<std::int64_t>();
        e.at = j.value("at", std::string{});
        e.type = event_type_from_string(j.at("type").get<std::string>());
        e.payload = j.at("payload");
    } catch (const json::exception& ex) {
        fail(ErrorKind::CorruptLog, std::string("malformed event: ") + ex.what());
    }
    return e;
}

std::string serialize_event(const Event& e) { return to_json(e).dump(); }

namespace {

[[noreturn]] void corrupt(const Event& e, const std::string& why) {
    fail(ErrorKind::CorruptLog, "event seq " + std::to_string(e.seq) + " (" + std::string(to_string(e.type)) + "): " + why);
}

}  // namespace

SessionState apply_event(SessionState s, const Event& e) {
    if (e.seq != s.last_seq + 1) corrupt(e, "expected seq " + std::to_string(s.last_seq + 1));
    if ((e.type == EventType::SessionCreated) != (s.last_seq == 0)) corrupt(e, "session_created must be the first event, and only it");
    try {
        switch (e.type) {
            case EventType::SessionCreated:
                s.id = e.payload.at("id").get<std::string>();
                s.mode = mode_from_string(e.payload.at("mode").get<std::string>());
                s.cfg = e.payload.at("cfg").get<SessionConfig>();
                s.created_at = e.at;
                break;
            case EventType::DesignTested:
                if (s.mode != Mode::DesignerLed || s.stage != Stage::Design) corrupt(e, "informal test outside designer-led design stage");
                s.informal_tests.push_back(e.payload.at("design").get<DesignParams>());
                s.visited.push_back({s.informal_tests.back(), false});
                break;
            case EventType::ProposalIssued:
                if (s.mode != Mode::OptimizerDriven || s.stage != Stage::Design || s.pending_proposal)
                    corrupt(e, "proposal not allowed here");
                s.pending_proposal = Proposal{e.payload.at("design").get<DesignParams>(),
                                              proposal_tag_from_string(e.payload.at("tag").get<std::string>())};
                s.proposal_tags.push_back(s.pending_proposal->tag);
                break;
            case EventType::EvaluationCompleted: {
                if (s.stage != Stage::Design) corrupt(e, "evaluation outside design stage");
                auto result = e.payload.at("evaluation").get<EvaluationResult>();
                if (s.mode == Mode::OptimizerDriven) {
                    if (!s.pending_proposal || !(s.pending_proposal->design == result.design))
                        corrupt(e, "evaluation does not match the pending proposal");
                    s.pending_proposal.reset();
                }
                s.evaluations.push_back(result);
                s.evaluation_sources.push_back(source_from_string(e.payload.at("source").get<std::string>()));
                s.visited.push_back({result.design, true});
                if (s.mode == Mode::OptimizerDriven && s.evaluations.size() == static_cast<std::size_t>(s.cfg.mobo.n_total))
                    s.stage = Stage::Decision;
                break;
            }
            case EventType::DecisionMade: {
                const bool ready = s.mode == Mode::OptimizerDriven ? s.stage == Stage::Decision
                                                                   : s.stage == Stage::Design && !s.evaluations.empty();
                if (!ready) corrupt(e, "decision not allowed in this stage");
                const auto picks = e.payload.at("picks").get<std::vector<std::size_t>>();
                if (picks.size() != 3) corrupt(e, "decision needs 3 picks");
                for (auto p : picks)
                    if (p >= s.evaluations.size()) corrupt(e, "pick out of range");
                s.picks = std::array<std::size_t, 3>{picks[0], picks[1], picks[2]};
                s.stage = Stage::Complete;
                break;
            }
        }
    } catch (const json::exception& ex) {
        corrupt(e, std::string("bad payload: ") + ex.what());
    } catch (const Error& ex) {
        if (ex.kind() == ErrorKind::CorruptLog) throw;
        corrupt(e, ex.what());
    }
    s.last_seq = e.seq;
    return s;
}

SessionState replay(std::span<const Event> log) {
    if (log.empty()) fail(ErrorKind::CorruptLog, "empty event log");
    SessionState s;
    for (const auto& e : log) s = apply_event(std::move(s), e);
    return s;
}

std::vector<Event> read_log(std::istream& in) {
    std::vector<Event> log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            fail(ErrorKind::CorruptLog, "line " + std::to_string(line_no) + " (after seq " +
                                            std::to_string(log.empty() ? 0 : log.back().seq) + "): invalid JSON");
        }
        try {
            log.push_back(event_from_json(j));
        } catch (const Error& ex) {
            fail(ErrorKind::CorruptLog, "line " + std::to_string(line_no) + ": " + ex.what());
        }
    }
    return log;
}

void write_log(std::ostream& out, std::span<const Event> log) {
    for (const auto& e : log) out << serialize_event(e) << '\n';
}

std::string utc_now() {
    using namespace std::chrono;
    const auto now = system_clock::now();
    const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
    const std::time_t t = system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[40];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
    return out;
}

Clock counting_clock(std::int64_t start_unix_seconds) {
    auto next = std::make_shared<std::int64_t>(start_unix_seconds);
    return [next] {
        const std::time_t t = static_cast<std::time_t>((*next)++);
        std::tm tm{};
        gmtime_r(&t, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S.000Z", &tm);
        return std::string(buf);
    };
}

std::uint64_t evaluation_block_seed(const SessionState& s, std::size_t evaluation_index) {
    return derive_seed({s.cfg.mobo.seed, s.cfg.skill.seed, evaluation_index, 0x626C6F636BULL});
}

Session Session::create(std::string id, Mode mode, SessionConfig cfg, Clock clock, Sink sink) {
    cfg.mobo.validate();
    cfg.skill.validate();
    if (id.empty()) fail(ErrorKind::Config, "session id must not be empty");
    Session s;
    s.clock_ = clock ? std::move(clock) : Clock(utc_now);
    s.sink_ = std::move(sink);
    s.append(EventType::SessionCreated, json{{"id", std::move(id)}, {"mode", to_string(mode)}, {"cfg", cfg}});
    return s;
}

Session Session::restore(std::vector<Event> log, Clock clock, Sink sink) {
    Session s;
    s.state_ = replay(log);
    s.log_ = std::move(log);
    s.clock_ = clock ? std::move(clock) : Clock(utc_now);
    s.sink_ = std::move(sink);
    return s;
}

void Session::append(EventType type, json payload) {
    Event e{state_.last_seq + 1, clock_(), type, std::move(payload)};
    SessionState next = apply_event(state_, e);
    if (sink_) sink_(e);
    log_.push_back(std::move(e));
    state_ = std::move(next);
}

void Session::require_open() const {
    if (state_.stage == Stage::Complete) fail(ErrorKind::Stage, "session is complete; no further changes");
}

Proposal Session::get_proposal() {
    require_open();
    if (state_.mode != Mode::OptimizerDriven) fail(ErrorKind::Mode, "designer-led sessions do not receive proposals");
    if (state_.stage == Stage::Decision) {
        fail(ErrorKind::Stage, "all " + std::to_string(state_.cfg.mobo.n_total) + " designs evaluated; submit a decision");
    }
    if (state_.pending_proposal) fail(ErrorKind::Sequencing, "a proposal is already pending evaluation");
    Rng rng = Rng::stream({state_.cfg.mobo.seed, state_.evaluations.size(), 0x70726F706FULL});
    Proposal p = propose_next(state_.evaluations, state_.cfg.mobo, rng);
    append(EventType::ProposalIssued, json{{"design", p.design}, {"tag", to_string(p.tag)}});
    return p;
}

EvaluationResult Session::submit_evaluation(const DesignParams& design, EvaluationSource source,
                                            std::optional<std::pair<double, double>> manual_metrics) {
    require_open();
    if (state_.stage != Stage::Design) fail(ErrorKind::Stage, "evaluations are closed; session is in the decision stage");
    validate(design);
    if (state_.mode == Mode::OptimizerDriven) {
        if (!state_.pending_proposal) fail(ErrorKind::Protocol, "no pending proposal to evaluate");
        if (!(state_.pending_proposal->design == design)) fail(ErrorKind::Protocol, "design differs from the pending proposal");
    }
    EvaluationResult result;
    json payload{{"source", to_string(source)}};
    if (source == EvaluationSource::Manual) {
        if (!manual_metrics) fail(ErrorKind::Validation, "manual evaluations need mean_time_ms and mean_error_cm");
        const auto [time_ms, error_cm] = *manual_metrics;
        if (!(time_ms > 0.0) || !std::isfinite(time_ms)) fail(ErrorKind::Validation, "mean_time_ms must be positive");
        if (!(error_cm >= 0.0) || !std::isfinite(error_cm)) fail(ErrorKind::Validation, "mean_error_cm must be non-negative");
        result = evaluation_from_metrics(design, time_ms, error_cm);
    } else {
        const std::uint64_t block_seed = evaluation_block_seed(state_, state_.evaluations.size());
        result = simulate_evaluation(design, state_.cfg.skill, block_seed);
        payload["block_seed"] = block_seed;
    }
    payload["evaluation"] = result;
    append(EventType::EvaluationCompleted, std::move(payload));
    return result;
}

void Session::record_informal_test(const DesignParams& design) {
    require_open();
    if (state_.mode != Mode::DesignerLed) fail(ErrorKind::Mode, "informal tests belong to designer-led sessions");
    validate(design);
    append(EventType::DesignTested, json{{"design", design}});
}

ParetoView Session::get_pareto() const {
    if (state_.evaluations.empty()) fail(ErrorKind::EmptyData, "no evaluations yet");
    ParetoView view;
    for (const auto& e : state_.evaluations) view.points.push_back(objectives_of(e));
    view.front = pareto_front(view.points);
    return view;
}

json Session::submit_decision(std::span<const std::size_t> picks) {
    require_open();
    if (state_.mode == Mode::OptimizerDriven && state_.stage != Stage::Decision) {
        fail(ErrorKind::Stage, "decision is only possible after all " + std::to_string(state_.cfg.mobo.n_total) + " evaluations");
    }
    if (state_.evaluations.empty()) fail(ErrorKind::EmptyData, "no evaluations to decide between");
    decision_stage(state_.evaluations, picks, state_.mode == Mode::OptimizerDriven);
    append(EventType::DecisionMade, json{{"picks", std::vector<std::size_t>(picks.begin(), picks.end())}});
    return session_report(state_, std::array{2, 3, 4, 5});
}

}  // namespace hmobo

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hmobo/design_domain.hpp"
#include "hmobo/evaluation.hpp"
#include "hmobo/mobo.hpp"
#include "hmobo/synthetic.hpp"

namespace hmobo {

enum class Mode { DesignerLed, OptimizerDriven };
enum class Stage { Design, Decision, Complete };
enum class EvaluationSource { Synthetic, Manual };
enum class EventType { SessionCreated, DesignTested, ProposalIssued, EvaluationCompleted, DecisionMade };

std::string_view to_string(Mode m);
std::string_view to_string(Stage s);
std::string_view to_string(EvaluationSource s);
std::string_view to_string(EventType t);
Mode mode_from_string(std::string_view s);
EvaluationSource source_from_string(std::string_view s);
EventType event_type_from_string(std::string_view s);

/// Everything a session needs besides its events: optimizer settings and the
/// synthetic participant used for `synthetic` evaluations.
struct SessionConfig {
    MoboConfig mobo;
    SkillProfile skill;
};

void to_json(nlohmann::json& j, const SessionConfig& c);
/// Accepts {"mobo": {...}, "skill": {...}}; missing sections keep defaults.
void from_json(const nlohmann::json& j, SessionConfig& c);

struct VisitedDesign {
    DesignParams design;
    bool formal = false;  // evaluation (true) or informal test (false)
};

struct SessionState {
    std::string id;
    Mode mode = Mode::OptimizerDriven;
    Stage stage = Stage::Design;
    std::vector<EvaluationResult> evaluations;
    std::vector<EvaluationSource> evaluation_sources;
    std::vector<DesignParams> informal_tests;
    /// Evaluations and informal tests in the order they happened.
    std::vector<VisitedDesign> visited;
    std::vector<ProposalTag> proposal_tags;
    std::optional<Proposal> pending_proposal;
    std::optional<std::array<std::size_t, 3>> picks;
    SessionConfig cfg;
    std::string created_at;
    std::int64_t last_seq = 0;
};

/// Canonical state view (sorted keys), used for byte-identical replay checks.
nlohmann::json to_json(const SessionState& s);

struct Event {
    std::int64_t seq = 0;
    std::string at;
    EventType type = EventType::SessionCreated;
    nlohmann::json payload;
};

nlohmann::json to_json(const Event& e);
Event event_from_json(const nlohmann::json& j);
/// One canonical JSON object, no trailing newline.
std::string serialize_event(const Event& e);

/// Applies one event. Throws CorruptLog when the event cannot follow `state`.
SessionState apply_event(SessionState state, const Event& e);
/// Folds a complete log. Empty logs, gaps and a missing session_created are CorruptLog.
SessionState replay(std::span<const Event> log);

/// Parses JSON lines. Errors name the line and, when readable, the seq.
std::vector<Event> read_log(std::istream& in);
void write_log(std::ostream& out, std::span<const Event> log);

using Clock = std::function<std::string()>;
/// UTC ISO-8601 with milliseconds.
std::string utc_now();
/// Deterministic clock for simulations: fixed epoch advanced one second per call.
Clock counting_clock(std::int64_t start_unix_seconds = 1'700'000'000);

struct ParetoView {
    std::vector<std::size_t> front;
    std::vector<ObjectivePoint> points;
};

/// A session: the event log plus the state folded from it. Every mutation is
/// recorded as an event first, then applied, so state == replay(log) always.
class Session {
public:
    using Sink = std::function<void(const Event&)>;

    static Session create(std::string id, Mode mode, SessionConfig cfg, Clock clock = utc_now, Sink sink = {});
    /// Rebuilds from a stored log. The sink sees only events appended afterwards.
    static Session restore(std::vector<Event> log, Clock clock = utc_now, Sink sink = {});

    const SessionState& state() const { return state_; }
    const std::vector<Event>& log() const { return log_; }

    Proposal get_proposal();
    EvaluationResult submit_evaluation(const DesignParams& design, EvaluationSource source,
                                       std::optional<std::pair<double, double>> manual_metrics = std::nullopt);
    void record_informal_test(const DesignParams& design);
    ParetoView get_pareto() const;
    /// Returns the session report at m = 2..5.
    nlohmann::json submit_decision(std::span<const std::size_t> picks);

private:
    Session() = default;
    void append(EventType type, nlohmann::json payload);
    void require_open() const;

    std::vector<Event> log_;
    SessionState state_;
    Clock clock_;
    Sink sink_;
};

/// Block seed used for the n-th synthetic evaluation of a session.
std::uint64_t evaluation_block_seed(const SessionState& s, std::size_t evaluation_index);

}  // namespace hmobo

#include "hmobo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "hmobo/analysis.hpp"
#include "hmobo/error.hpp"

namespace hmobo {

namespace {

constexpr std::uint64_t kSkillKey = 0x736B696C6CULL;
constexpr std::uint64_t kOptimizerKey = 0x6F7074ULL;
constexpr std::uint64_t kBaselineKey = 0x626173ULL;
constexpr std::uint64_t kRemeasureKey = 0x72656DULL;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

template <typename Fn>
void for_each_index(int count, int jobs, Fn&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < std::min(jobs, count); ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) fn(i);
        });
    }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
}

}  // namespace

std::array<std::size_t, 3> automatic_picks(std::span<const EvaluationResult> evaluations) {
    std::vector<ObjectivePoint> points;
    for (const auto& e : evaluations) points.push_back(objectives_of(e));
    const auto front = pareto_front(points);
    auto best_by = [&](auto key) {
        std::size_t best = front.front();
        for (auto i : front)
            if (key(points[i]) > key(points[best])) best = i;
        return best;
    };
    return {best_by([](const ObjectivePoint& p) { return p.speed; }),
            best_by([](const ObjectivePoint& p) { return p.accuracy; }),
            best_by([](const ObjectivePoint& p) { return p.speed + p.accuracy; })};
}

Session run_optimizer_session(const SessionConfig& cfg, const std::string& id, Clock clock) {
    Session session = Session::create(id, Mode::OptimizerDriven, cfg, std::move(clock));
    while (session.state().stage == Stage::Design) {
        const Proposal p = session.get_proposal();
        session.submit_evaluation(p.design, EvaluationSource::Synthetic);
    }
    const auto picks = automatic_picks(session.state().evaluations);
    session.submit_decision(picks);
    return session;
}

SessionSummary summarize_session(const Session& session, std::uint64_t seed, const std::string& mode_label,
                                 DistanceDenominator denominator) {
    const SessionState& s = session.state();
    if (!s.picks) fail(ErrorKind::Stage, "session " + s.id + " has no decision to summarize");
    SessionSummary row;
    row.mode = mode_label;
    row.seed = seed;
    // A separate measurement of each final design, with trial blocks the session never saw.
    for (std::size_t j = 0; j < 3; ++j) {
        const auto& design = s.evaluations[(*s.picks)[j]].design;
        const auto r = simulate_evaluation(design, s.cfg.skill, derive_seed({seed, kRemeasureKey, j}));
        row.mean_time += r.mean_time_ms / 3.0;
        row.mean_error += r.mean_error_cm / 3.0;
    }
    std::vector<UnitPoint> visited;
    for (const auto& v : s.visited) visited.push_back(encode_unit(v.design));
    row.coverage_m2 = hypercube_coverage(visited, 2).covered;
    row.coverage_m3 = hypercube_coverage(visited, 3).covered;
    row.tsd = total_successive_distance(visited);
    row.ntsd = normalized_successive_distance(visited, denominator);
    return row;
}

std::uint64_t session_seed(std::uint64_t base_seed, int index) {
    return derive_seed({base_seed, static_cast<std::uint64_t>(index)});
}

nlohmann::json compare(std::span<const SessionSummary> optimizer, std::span<const SessionSummary> baseline) {
    using nlohmann::json;
    struct Metric {
        const char* name;
        double (*get)(const SessionSummary&);
        bool lower_is_better;
    };
    const Metric metrics[] = {
        {"mean_time", [](const SessionSummary& s) { return s.mean_time; }, true},
        {"mean_error", [](const SessionSummary& s) { return s.mean_error; }, true},
        {"coverage_m2", [](const SessionSummary& s) { return static_cast<double>(s.coverage_m2); }, false},
        {"coverage_m3", [](const SessionSummary& s) { return static_cast<double>(s.coverage_m3); }, false},
        {"tsd", [](const SessionSummary& s) { return s.tsd; }, false},
        {"ntsd", [](const SessionSummary& s) { return s.ntsd; }, false},
    };
    json out = json::object();
    for (const auto& m : metrics) {
        std::vector<double> a;
        std::vector<double> b;
        for (const auto& s : optimizer) a.push_back(m.get(s));
        for (const auto& s : baseline) b.push_back(m.get(s));
        json entry = json::object();
        if (!a.empty()) entry["optimizer"] = json{{"mean", summarize(a).mean}, {"sd", summarize(a).sd}};
        if (!b.empty()) entry["baseline"] = json{{"mean", summarize(b).mean}, {"sd", summarize(b).sd}};
        if (a.size() >= 2 && b.size() >= 2) {
            const auto w = welch_t(a, b);
            entry["welch"] = json{{"t", w.t}, {"df", w.df}};
        }
        const std::size_t paired = std::min(a.size(), b.size());
        if (paired > 0) {
            // Share of paired seeds where the optimizer is at least as good (strictly better for exploration).
            std::size_t wins = 0;
            for (std::size_t i = 0; i < paired; ++i) wins += m.lower_is_better ? a[i] <= b[i] : a[i] > b[i];
            entry["optimizer_win_fraction"] = static_cast<double>(wins) / static_cast<double>(paired);
        }
        out[m.name] = std::move(entry);
    }
    return out;
}

SimulationOutcome run_simulation(const SimulateOptions& options) {
    if (options.sessions < 1) fail(ErrorKind::Config, "--sessions must be >= 1");
    options.strategy.validate();
    options.mobo.validate();

    SimulationOutcome outcome;
    const int n = options.sessions;
    std::vector<std::optional<Session>> opt_sessions(static_cast<std::size_t>(n));
    std::vector<std::optional<Session>> base_sessions(static_cast<std::size_t>(n));
    std::vector<SessionSummary> opt_rows(static_cast<std::size_t>(n));
    std::vector<SessionSummary> base_rows(static_cast<std::size_t>(n));

    for_each_index(n, options.jobs, [&](int i) {
        const std::uint64_t seed = session_seed(options.seed, i);
        const SkillProfile skill = SkillProfile::sample(derive_seed({seed, kSkillKey}));
        const auto idx = static_cast<std::size_t>(i);
        if (options.run_optimizer) {
            SessionConfig cfg{options.mobo, skill};
            cfg.mobo.seed = derive_seed({seed, kOptimizerKey});
            opt_sessions[idx] = run_optimizer_session(cfg, "optimizer-" + std::to_string(i));
            opt_rows[idx] = summarize_session(*opt_sessions[idx], seed, "optimizer_driven", options.denominator);
        }
        if (options.run_baselines) {
            Session s = run_baseline_session(options.strategy, skill, derive_seed({seed, kBaselineKey}));
            s.submit_decision(automatic_picks(s.state().evaluations));
            base_sessions[idx] = std::move(s);
            base_rows[idx] = summarize_session(*base_sessions[idx], seed, std::string(to_string(options.strategy.kind)),
                                               options.denominator);
        }
    });

    for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (options.run_optimizer) {
            outcome.optimizer.push_back(opt_rows[idx]);
            outcome.optimizer_sessions.push_back(std::move(*opt_sessions[idx]));
        }
        if (options.run_baselines) {
            outcome.baseline.push_back(base_rows[idx]);
            outcome.baseline_sessions.push_back(std::move(*base_sessions[idx]));
        }
    }
    outcome.comparison = compare(outcome.optimizer, outcome.baseline);

    if (!options.out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(options.out_dir / "logs", ec);
        if (ec) fail(ErrorKind::Io, "cannot create " + (options.out_dir / "logs").string() + ": " + ec.message());
        auto write_logs = [&](const std::vector<Session>& sessions) {
            for (const auto& s : sessions) {
                std::ostringstream os;
                write_log(os, s.log());
                write_file(options.out_dir / "logs" / (s.state().id + ".jsonl"), os.str());
            }
        };
        write_logs(outcome.optimizer_sessions);
        write_logs(outcome.baseline_sessions);
        write_file(options.out_dir / "summary.csv", summary_csv(outcome));
        write_file(options.out_dir / "objectives.csv", objectives_csv(outcome));
        write_file(options.out_dir / "comparison.json", outcome.comparison.dump(2) + "\n");
    }
    return outcome;
}

std::string summary_csv(const SimulationOutcome& outcome) {
    std::ostringstream os;
    os << "mode,seed,mean_time,mean_error,coverage_m2,coverage_m3,tsd,ntsd\n";
    auto rows = [&](const std::vector<SessionSummary>& v) {
        for (const auto& r : v) {
            os << r.mode << ',' << r.seed << ',' << format_double(r.mean_time) << ',' << format_double(r.mean_error) << ','
               << r.coverage_m2 << ',' << r.coverage_m3 << ',' << format_double(r.tsd) << ',' << format_double(r.ntsd) << '\n';
        }
    };
    rows(outcome.optimizer);
    rows(outcome.baseline);
    return os.str();
}

std::string objectives_csv(const SimulationOutcome& outcome) {
    std::ostringstream os;
    os << "mode,seed,index,speed,accuracy,pareto\n";
    auto rows = [&](const std::vector<Session>& sessions, const std::vector<SessionSummary>& summaries) {
        for (std::size_t k = 0; k < sessions.size(); ++k) {
            const auto& evals = sessions[k].state().evaluations;
            std::vector<ObjectivePoint> pts;
            for (const auto& e : evals) pts.push_back(objectives_of(e));
            const auto front = pareto_front(pts);
            for (std::size_t i = 0; i < evals.size(); ++i) {
                os << summaries[k].mode << ',' << summaries[k].seed << ',' << i << ',' << format_double(pts[i].speed) << ','
                   << format_double(pts[i].accuracy) << ',' << (std::binary_search(front.begin(), front.end(), i) ? 1 : 0)
                   << '\n';
            }
        }
    };
    rows(outcome.optimizer_sessions, outcome.optimizer);
    rows(outcome.baseline_sessions, outcome.baseline);
    return os.str();
}

}  // namespace hmobo

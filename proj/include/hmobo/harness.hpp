#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hmobo/analysis.hpp"
#include "hmobo/baseline.hpp"
#include "hmobo/mobo.hpp"
#include "hmobo/session.hpp"

// Optimizer-driven vs designer-led comparison on synthetic participants.

namespace hmobo {

/// (max speed, max accuracy, max speed + accuracy) over the Pareto front; ties
/// go to the lowest index.
std::array<std::size_t, 3> automatic_picks(std::span<const EvaluationResult> evaluations);

/// Full 40-evaluation optimizer-driven session with synthetic evaluations,
/// closed by automatic_picks.
Session run_optimizer_session(const SessionConfig& cfg, const std::string& id, Clock clock = counting_clock());

struct SessionSummary {
    std::string mode;
    std::uint64_t seed = 0;
    double mean_time = 0.0;   // re-measured final picks, ms
    double mean_error = 0.0;  // re-measured final picks, cm
    int coverage_m2 = 0;
    int coverage_m3 = 0;
    double tsd = 0.0;
    double ntsd = 0.0;
};

/// Re-measures the three picks with fresh trial blocks and computes exploration metrics.
SessionSummary summarize_session(const Session& session, std::uint64_t seed, const std::string& mode_label,
                                 DistanceDenominator denominator = DistanceDenominator::Designs);

struct SimulateOptions {
    int sessions = 1;
    std::uint64_t seed = 0;
    bool run_optimizer = true;
    bool run_baselines = true;
    StrategyConfig strategy;
    MoboConfig mobo;
    DistanceDenominator denominator = DistanceDenominator::Designs;
    int jobs = 1;
    /// Empty: nothing is written.
    std::filesystem::path out_dir;
};

struct SimulationOutcome {
    std::vector<SessionSummary> optimizer;
    std::vector<SessionSummary> baseline;
    std::vector<Session> optimizer_sessions;
    std::vector<Session> baseline_sessions;
    nlohmann::json comparison;
};

/// Per-index seeds shared by both modes so sessions are paired by participant.
std::uint64_t session_seed(std::uint64_t base_seed, int index);

SimulationOutcome run_simulation(const SimulateOptions& options);

/// One row per session: mode,seed,mean_time,mean_error,coverage_m2,coverage_m3,tsd,ntsd.
std::string summary_csv(const SimulationOutcome& outcome);
/// One row per evaluation: mode,seed,index,speed,accuracy,pareto.
std::string objectives_csv(const SimulationOutcome& outcome);
nlohmann::json compare(std::span<const SessionSummary> optimizer, std::span<const SessionSummary> baseline);

}  // namespace hmobo

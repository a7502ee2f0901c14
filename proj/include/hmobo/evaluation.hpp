#pragma once

#include <span>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "hmobo/design_domain.hpp"

namespace hmobo {

// Raw-metric ranges that map onto [-1, 1] for the maximized objectives.
inline constexpr double kSlowTimeMs = 1600.0;
inline constexpr double kFastTimeMs = 900.0;
inline constexpr double kWorstErrorCm = 1.0;
inline constexpr double kBestErrorCm = 0.0;

struct TrialOutcome {
    double completion_time_ms = 0.0;
    double max_overshoot_cm = 0.0;
    bool timed_out = false;
};

struct EvaluationResult {
    DesignParams design;
    double mean_time_ms = 0.0;
    double mean_error_cm = 0.0;
    double speed = 0.0;
    double accuracy = 0.0;
    int trial_count = 0;

    friend bool operator==(const EvaluationResult&, const EvaluationResult&) = default;
};

/// Affine map 1600 ms -> -1, 900 ms -> +1. Not clamped.
double normalize_speed(double time_ms);
/// Affine map 1 cm -> -1, 0 cm -> +1. Not clamped.
double normalize_accuracy(double error_cm);

/// Largest excursion beyond the target surface over a sampled trajectory.
/// Samples inside the target contribute zero.
double trial_spatial_error(std::span<const Eigen::Vector3d> trajectory, const Eigen::Vector3d& target_center,
                           double target_radius_cm);

/// Means over exactly 36 trials. Throws ErrorKind::Protocol on any other count.
EvaluationResult aggregate_evaluation(const DesignParams& design, std::span<const TrialOutcome> trials);

/// Builds a result from already-aggregated metrics (manual source, CSV import).
EvaluationResult evaluation_from_metrics(const DesignParams& design, double mean_time_ms, double mean_error_cm,
                                         int trial_count = static_cast<int>(kTrialsPerBlock));

void to_json(nlohmann::json& j, const EvaluationResult& e);
void from_json(const nlohmann::json& j, EvaluationResult& e);

}  // namespace hmobo

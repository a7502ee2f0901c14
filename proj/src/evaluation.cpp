#include "hmobo/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "hmobo/error.hpp"

namespace hmobo {

double normalize_speed(double time_ms) {
    if (!(time_ms > 0.0) || !std::isfinite(time_ms)) fail(ErrorKind::Domain, "completion time must be positive");
    constexpr double half_span = (kSlowTimeMs - kFastTimeMs) / 2.0;
    return (kSlowTimeMs - time_ms) / half_span - 1.0;
}

double normalize_accuracy(double error_cm) {
    if (!(error_cm >= 0.0) || !std::isfinite(error_cm)) fail(ErrorKind::Domain, "spatial error must be non-negative");
    constexpr double half_span = (kWorstErrorCm - kBestErrorCm) / 2.0;
    return (kWorstErrorCm - error_cm) / half_span - 1.0;
}

double trial_spatial_error(std::span<const Eigen::Vector3d> trajectory, const Eigen::Vector3d& target_center,
                           double target_radius_cm) {
    double worst = 0.0;
    for (const auto& cursor : trajectory) {
        worst = std::max(worst, (cursor - target_center).norm() - target_radius_cm);
    }
    return worst;
}

EvaluationResult aggregate_evaluation(const DesignParams& design, std::span<const TrialOutcome> trials) {
    if (trials.size() != kTrialsPerBlock) {
        fail(ErrorKind::Protocol, "formal evaluation needs " + std::to_string(kTrialsPerBlock) + " trials, got " +
                                      std::to_string(trials.size()));
    }
    double time_sum = 0.0;
    double error_sum = 0.0;
    for (const auto& t : trials) {
        time_sum += t.completion_time_ms;
        error_sum += t.max_overshoot_cm;
    }
    const double n = static_cast<double>(trials.size());
    return evaluation_from_metrics(design, time_sum / n, error_sum / n, static_cast<int>(trials.size()));
}

EvaluationResult evaluation_from_metrics(const DesignParams& design, double mean_time_ms, double mean_error_cm,
                                         int trial_count) {
    validate(design);
    EvaluationResult r;
    r.design = design;
    r.mean_time_ms = mean_time_ms;
    r.mean_error_cm = mean_error_cm;
    r.speed = normalize_speed(mean_time_ms);
    r.accuracy = normalize_accuracy(mean_error_cm);
    r.trial_count = trial_count;
    return r;
}

void to_json(nlohmann::json& j, const EvaluationResult& e) {
    j = nlohmann::json{{"design", e.design},   {"mean_time_ms", e.mean_time_ms}, {"mean_error_cm", e.mean_error_cm},
                       {"speed", e.speed},     {"accuracy", e.accuracy},         {"trial_count", e.trial_count}};
}

void from_json(const nlohmann::json& j, EvaluationResult& e) {
    e.design = j.at("design").get<DesignParams>();
    e.mean_time_ms = j.at("mean_time_ms").get<double>();
    e.mean_error_cm = j.at("mean_error_cm").get<double>();
    e.speed = j.at("speed").get<double>();
    e.accuracy = j.at("accuracy").get<double>();
    e.trial_count = j.at("trial_count").get<int>();
}

}  // namespace hmobo

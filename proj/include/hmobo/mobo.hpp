#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "hmobo/design_domain.hpp"
#include "hmobo/evaluation.hpp"
#include "hmobo/gp.hpp"
#include "hmobo/random.hpp"

namespace hmobo {

/// Both coordinates are maximized.
struct ObjectivePoint {
    double speed = 0.0;
    double accuracy = 0.0;

    friend bool operator==(const ObjectivePoint&, const ObjectivePoint&) = default;
};

inline ObjectivePoint objectives_of(const EvaluationResult& e) { return {e.speed, e.accuracy}; }

/// a dominates b: no worse in both, strictly better in one.
inline bool dominates(const ObjectivePoint& a, const ObjectivePoint& b) {
    return a.speed >= b.speed && a.accuracy >= b.accuracy && (a.speed > b.speed || a.accuracy > b.accuracy);
}

struct MoboConfig {
    int n_init = 10;
    int n_total = 40;
    int q = 1;
    int mc_samples = 512;
    int restarts = 10;
    int raw_candidates = 1024;
    int gp_restarts = 8;
    ObjectivePoint ref_point{-1.1, -1.1};
    std::uint64_t seed = 0;
    /// Seed designs from a Sobol sequence instead of uniform draws.
    bool sobol_seeds = false;
    /// Worker threads for candidate scoring; results do not depend on it.
    int threads = 1;

    /// Throws ErrorKind::Config.
    void validate() const;
};

void to_json(nlohmann::json& j, const ObjectivePoint& p);
void from_json(const nlohmann::json& j, ObjectivePoint& p);
void to_json(nlohmann::json& j, const MoboConfig& c);
/// Missing keys keep their defaults; the result is validated.
void from_json(const nlohmann::json& j, MoboConfig& c);

/// Indices of non-dominated points, ascending. Equal duplicates all survive.
std::vector<std::size_t> pareto_front(std::span<const ObjectivePoint> points);

/// Exact area dominated by `points` and bounded below by `ref`. Points that do
/// not strictly dominate ref are ignored; dominated points are filtered.
double hypervolume_2d(std::span<const ObjectivePoint> points, const ObjectivePoint& ref);

/// hypervolume_2d(front + y) - hypervolume_2d(front).
double hvi(std::span<const ObjectivePoint> front, const ObjectivePoint& y, const ObjectivePoint& ref);

/// A front reduced to its ref-dominating staircase, for repeated O(n) improvement queries.
class Staircase {
public:
    Staircase(std::span<const ObjectivePoint> points, const ObjectivePoint& ref);

    double improvement(const ObjectivePoint& y) const;
    double volume() const { return volume_; }
    /// Sorted by speed descending (accuracy therefore ascending).
    const std::vector<ObjectivePoint>& steps() const { return steps_; }

private:
    std::vector<ObjectivePoint> steps_;
    ObjectivePoint ref_;
    double volume_ = 0.0;
};

using ObjectiveModels = std::array<GPModel, 2>;

/// Standard-normal base samples, mc_samples rows by 2 objectives.
Eigen::MatrixX2d draw_base_samples(int mc_samples, Rng& rng);

/// Monte-Carlo expected hypervolume improvement of a single candidate.
double qehvi(const ObjectiveModels& models, const UnitPoint& x, const Staircase& front,
             const Eigen::MatrixX2d& base_samples);
double qehvi(const ObjectiveModels& models, const UnitPoint& x, std::span<const ObjectivePoint> front,
             const MoboConfig& cfg, const Eigen::MatrixX2d& base_samples);

struct AcquisitionTrace {
    double best_raw_score = 0.0;
    double best_refined_score = 0.0;
};

/// Scores raw_candidates uniform points under one base-sample set, refines the
/// best `restarts` by coordinate pattern search, returns the best refined point.
UnitPoint optimize_acquisition(const ObjectiveModels& models, std::span<const ObjectivePoint> front,
                               const MoboConfig& cfg, Rng& rng, AcquisitionTrace* trace = nullptr);

/// Pattern search on an arbitrary acquisition surface; never returns a worse point.
template <typename Objective>
UnitPoint pattern_search(const Objective& objective, UnitPoint start, double& score) {
    double step = 0.1;
    for (int round = 0; round < 50 && step >= 1e-3; ++round) {
        UnitPoint best = start;
        double best_score = score;
        for (int d = 0; d < kDesignDims; ++d) {
            for (double dir : {1.0, -1.0}) {
                UnitPoint trial = start;
                trial[d] = std::clamp(trial[d] + dir * step, 0.0, 1.0);
                if (trial[d] == start[d]) continue;
                const double s = objective(trial);
                if (s > best_score) {
                    best_score = s;
                    best = trial;
                }
            }
        }
        if (best_score > score) {
            start = best;
            score = best_score;
        } else {
            step *= 0.5;
        }
    }
    return start;
}

enum class ProposalTag { Seed, Acquisition };
std::string_view to_string(ProposalTag tag);
ProposalTag proposal_tag_from_string(std::string_view s);

struct Proposal {
    DesignParams design;
    ProposalTag tag = ProposalTag::Seed;
};

/// Fits one GP per objective on the normalized history.
ObjectiveModels fit_objective_models(std::span<const EvaluationResult> history, const MoboConfig& cfg,
                                     std::uint64_t seed);

/// Seed design for the first n_init iterations, acquisition design afterwards.
/// Throws ProtocolComplete once n_total evaluations exist.
Proposal propose_next(std::span<const EvaluationResult> history, const MoboConfig& cfg, Rng& rng);

/// Returns the picked evaluations. Picks must be exactly three; repeats are
/// allowed. With require_pareto every pick must lie on the front.
std::vector<EvaluationResult> decision_stage(std::span<const EvaluationResult> history,
                                             std::span<const std::size_t> picks, bool require_pareto = true);

}  // namespace hmobo

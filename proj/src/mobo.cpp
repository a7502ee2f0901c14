#include "hmobo/mobo.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include <boost/random/sobol.hpp>
#include <nlohmann/json.hpp>

#include "hmobo/error.hpp"

namespace hmobo {

void MoboConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) fail(ErrorKind::Config, what);
    };
    require(n_init >= 1 && n_total >= 1 && mc_samples >= 1 && restarts >= 1 && raw_candidates >= 1 && gp_restarts >= 1,
            "all counts must be >= 1");
    require(n_init >= 2, "n_init must be >= 2 so the surrogate has data to fit");
    require(n_init < n_total, "n_init must be smaller than n_total");
    require(q == 1, "only q = 1 is supported");
    require(restarts <= raw_candidates, "restarts cannot exceed raw_candidates");
    require(std::isfinite(ref_point.speed) && std::isfinite(ref_point.accuracy), "ref_point must be finite");
    require(threads >= 1, "threads must be >= 1");
}

void to_json(nlohmann::json& j, const ObjectivePoint& p) { j = nlohmann::json{{"speed", p.speed}, {"accuracy", p.accuracy}}; }

void from_json(const nlohmann::json& j, ObjectivePoint& p) {
    p.speed = j.at("speed").get<double>();
    p.accuracy = j.at("accuracy").get<double>();
}

void to_json(nlohmann::json& j, const MoboConfig& c) {
    j = nlohmann::json{{"n_init", c.n_init},
                       {"n_total", c.n_total},
                       {"q", c.q},
                       {"mc_samples", c.mc_samples},
                       {"restarts", c.restarts},
                       {"raw_candidates", c.raw_candidates},
                       {"gp_restarts", c.gp_restarts},
                       {"ref_point", c.ref_point},
                       {"seed", c.seed},
                       {"sobol_seeds", c.sobol_seeds}};
}

void from_json(const nlohmann::json& j, MoboConfig& c) {
    if (!j.is_object()) fail(ErrorKind::Config, "mobo config must be an object");
    try {
        c.n_init = j.value("n_init", c.n_init);
        c.n_total = j.value("n_total", c.n_total);
        c.q = j.value("q", c.q);
        c.mc_samples = j.value("mc_samples", c.mc_samples);
        c.restarts = j.value("restarts", c.restarts);
        c.raw_candidates = j.value("raw_candidates", c.raw_candidates);
        c.gp_restarts = j.value("gp_restarts", c.gp_restarts);
        if (j.contains("ref_point")) c.ref_point = j.at("ref_point").get<ObjectivePoint>();
        c.seed = j.value("seed", c.seed);
        c.sobol_seeds = j.value("sobol_seeds", c.sobol_seeds);
        c.threads = j.value("threads", c.threads);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Config, std::string("mobo config: ") + e.what());
    }
    c.validate();
}

std::vector<std::size_t> pareto_front(std::span<const ObjectivePoint> points) {
    if (points.empty()) fail(ErrorKind::Domain, "pareto_front of an empty set");
    // Sort by speed descending, accuracy descending; a point survives iff no
    // earlier point (speed >= its speed) has accuracy strictly greater, or an
    // equal accuracy with strictly greater speed.
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].speed != points[b].speed) return points[a].speed > points[b].speed;
        return points[a].accuracy > points[b].accuracy;
    });
    std::vector<std::size_t> front;
    double best_acc = -std::numeric_limits<double>::infinity();
    ObjectivePoint last_kept{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    for (std::size_t idx : order) {
        const auto& p = points[idx];
        if (p.accuracy > best_acc) {
            front.push_back(idx);
            best_acc = p.accuracy;
            last_kept = p;
        } else if (p == last_kept) {
            front.push_back(idx);
        }
    }
    std::sort(front.begin(), front.end());
    return front;
}

Staircase::Staircase(std::span<const ObjectivePoint> points, const ObjectivePoint& ref) : ref_(ref) {
    std::vector<ObjectivePoint> usable;
    usable.reserve(points.size());
    for (const auto& p : points) {
        if (p.speed > ref.speed && p.accuracy > ref.accuracy) usable.push_back(p);
    }
    std::sort(usable.begin(), usable.end(), [](const ObjectivePoint& a, const ObjectivePoint& b) {
        if (a.speed != b.speed) return a.speed > b.speed;
        return a.accuracy > b.accuracy;
    });
    double best_acc = ref.accuracy;
    for (const auto& p : usable) {
        if (p.accuracy > best_acc) {
            steps_.push_back(p);
            best_acc = p.accuracy;
        }
    }
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        const double next_speed = i + 1 < steps_.size() ? steps_[i + 1].speed : ref.speed;
        volume_ += (steps_[i].speed - next_speed) * (steps_[i].accuracy - ref.accuracy);
    }
}

double Staircase::improvement(const ObjectivePoint& y) const {
    if (!(y.speed > ref_.speed && y.accuracy > ref_.accuracy)) return 0.0;
    // Integrate the uncovered height (y.accuracy - front height) over speed in
    // (ref.speed, y.speed]. The front height is a_i on (s_{i+1}, s_i] and ref
    // above the fastest step.
    double total = 0.0;
    double upper = y.speed;
    double height = ref_.accuracy;
    for (const auto& step : steps_) {
        if (height >= y.accuracy) return total;
        const double lower = std::max(step.speed, ref_.speed);
        if (upper > lower) {
            total += (upper - lower) * (y.accuracy - height);
            upper = lower;
        }
        height = step.accuracy;
    }
    if (height < y.accuracy && upper > ref_.speed) total += (upper - ref_.speed) * (y.accuracy - height);
    return total;
}

double hypervolume_2d(std::span<const ObjectivePoint> points, const ObjectivePoint& ref) {
    return Staircase(points, ref).volume();
}

double hvi(std::span<const ObjectivePoint> front, const ObjectivePoint& y, const ObjectivePoint& ref) {
    return Staircase(front, ref).improvement(y);
}

Eigen::MatrixX2d draw_base_samples(int mc_samples, Rng& rng) {
    Eigen::MatrixX2d z(mc_samples, 2);
    for (int i = 0; i < mc_samples; ++i) {
        z(i, 0) = rng.normal();
        z(i, 1) = rng.normal();
    }
    return z;
}

double qehvi(const ObjectiveModels& models, const UnitPoint& x, const Staircase& front,
             const Eigen::MatrixX2d& base_samples) {
    const Prediction speed = models[0].predict(x);
    const Prediction accuracy = models[1].predict(x);
    const double sd_speed = std::sqrt(speed.variance);
    const double sd_accuracy = std::sqrt(accuracy.variance);
    double total = 0.0;
    for (Eigen::Index i = 0; i < base_samples.rows(); ++i) {
        total += front.improvement({speed.mean + sd_speed * base_samples(i, 0), accuracy.mean + sd_accuracy * base_samples(i, 1)});
    }
    return total / static_cast<double>(base_samples.rows());
}

double qehvi(const ObjectiveModels& models, const UnitPoint& x, std::span<const ObjectivePoint> front,
             const MoboConfig& cfg, const Eigen::MatrixX2d& base_samples) {
    return qehvi(models, x, Staircase(front, cfg.ref_point), base_samples);
}

UnitPoint optimize_acquisition(const ObjectiveModels& models, std::span<const ObjectivePoint> front,
                               const MoboConfig& cfg, Rng& rng, AcquisitionTrace* trace) {
    const Staircase staircase(front, cfg.ref_point);
    const Eigen::MatrixX2d base = draw_base_samples(cfg.mc_samples, rng);
    auto acquisition = [&](const UnitPoint& x) { return qehvi(models, x, staircase, base); };

    const auto n = static_cast<std::size_t>(cfg.raw_candidates);
    std::vector<UnitPoint> candidates(n);
    for (auto& c : candidates)
        for (int d = 0; d < kDesignDims; ++d) c[d] = rng.uniform();

    std::vector<double> scores(n);
    const auto workers = static_cast<std::size_t>(std::max(1, cfg.threads));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) scores[i] = acquisition(candidates[i]);
    } else {
        // Each worker owns a strided slice of the index space; scores land by index.
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < n; i += workers) scores[i] = acquisition(candidates[i]);
            });
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto top = std::min<std::size_t>(static_cast<std::size_t>(cfg.restarts), n);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                      [&](std::size_t a, std::size_t b) { return scores[a] != scores[b] ? scores[a] > scores[b] : a < b; });

    UnitPoint best = candidates[order[0]];
    double best_score = scores[order[0]];
    if (trace) trace->best_raw_score = best_score;
    for (std::size_t r = 0; r < top; ++r) {
        double score = scores[order[r]];
        const UnitPoint refined = pattern_search(acquisition, candidates[order[r]], score);
        if (score > best_score) {
            best_score = score;
            best = refined;
        }
    }
    if (trace) trace->best_refined_score = best_score;
    return best;
}

std::string_view to_string(ProposalTag tag) { return tag == ProposalTag::Seed ? "seed" : "acquisition"; }

ProposalTag proposal_tag_from_string(std::string_view s) {
    if (s == "seed") return ProposalTag::Seed;
    if (s == "acquisition") return ProposalTag::Acquisition;
    fail(ErrorKind::Validation, "unknown proposal tag '" + std::string(s) + "'");
}

ObjectiveModels fit_objective_models(std::span<const EvaluationResult> history, const MoboConfig& cfg,
                                     std::uint64_t seed) {
    const auto n = static_cast<Eigen::Index>(history.size());
    Eigen::MatrixX4d X(n, 4);
    Eigen::VectorXd speed(n);
    Eigen::VectorXd accuracy(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X.row(i) = encode_unit(history[static_cast<std::size_t>(i)].design).transpose();
        speed[i] = history[static_cast<std::size_t>(i)].speed;
        accuracy[i] = history[static_cast<std::size_t>(i)].accuracy;
    }
    return {fit(X, speed, {.restarts = cfg.gp_restarts, .seed = derive_seed({seed, 0})}),
            fit(X, accuracy, {.restarts = cfg.gp_restarts, .seed = derive_seed({seed, 1})})};
}

namespace {

UnitPoint seed_point(std::size_t index, const MoboConfig& cfg, Rng& rng) {
    UnitPoint u;
    if (cfg.sobol_seeds) {
        boost::random::sobol sobol(kDesignDims);
        sobol.discard(static_cast<std::uintmax_t>(kDesignDims) * (index + 1));  // skip the origin
        for (int d = 0; d < kDesignDims; ++d) {
            u[d] = static_cast<double>(sobol()) / (static_cast<double>(sobol.max()) + 1.0);
        }
    } else {
        for (int d = 0; d < kDesignDims; ++d) u[d] = rng.uniform();
    }
    return u;
}

}  // namespace

Proposal propose_next(std::span<const EvaluationResult> history, const MoboConfig& cfg, Rng& rng) {
    cfg.validate();
    if (history.size() >= static_cast<std::size_t>(cfg.n_total)) {
        fail(ErrorKind::ProtocolComplete, "all " + std::to_string(cfg.n_total) + " designs have been proposed");
    }
    if (history.size() < static_cast<std::size_t>(cfg.n_init)) {
        return {decode_unit(seed_point(history.size(), cfg, rng)), ProposalTag::Seed};
    }
    const ObjectiveModels models = fit_objective_models(history, cfg, rng.next());
    std::vector<ObjectivePoint> observed;
    observed.reserve(history.size());
    for (const auto& e : history) observed.push_back(objectives_of(e));
    std::vector<ObjectivePoint> front;
    for (std::size_t i : pareto_front(observed)) front.push_back(observed[i]);
    return {decode_unit(optimize_acquisition(models, front, cfg, rng)), ProposalTag::Acquisition};
}

std::vector<EvaluationResult> decision_stage(std::span<const EvaluationResult> history,
                                             std::span<const std::size_t> picks, bool require_pareto) {
    if (picks.size() != 3) fail(ErrorKind::Protocol, "decision needs exactly 3 picks, got " + std::to_string(picks.size()));
    if (history.empty()) fail(ErrorKind::EmptyData, "decision over an empty history");
    std::vector<std::size_t> front;
    if (require_pareto) {
        std::vector<ObjectivePoint> observed;
        for (const auto& e : history) observed.push_back(objectives_of(e));
        front = pareto_front(observed);
    }
    std::vector<EvaluationResult> out;
    for (std::size_t pick : picks) {
        if (pick >= history.size()) {
            fail(ErrorKind::InvalidSelection, "pick " + std::to_string(pick) + " is not an evaluated design");
        }
        if (require_pareto && !std::binary_search(front.begin(), front.end(), pick)) {
            fail(ErrorKind::InvalidSelection, "pick " + std::to_string(pick) + " is not Pareto optimal");
        }
        out.push_back(history[pick]);
    }
    return out;
}

}  // namespace hmobo

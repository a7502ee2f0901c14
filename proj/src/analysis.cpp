#include "hmobo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "hmobo/error.hpp"
#include "hmobo/mobo.hpp"
#include "hmobo/session.hpp"

namespace hmobo {

CoverageReport hypercube_coverage(std::span<const UnitPoint> designs, int m) {
    if (m < 1) fail(ErrorKind::Domain, "hypercube_coverage: m must be >= 1");
    std::set<std::array<int, 4>> cells;
    for (const auto& u : designs) {
        for (int d = 0; d < kDesignDims; ++d) {
            if (!(u[d] >= 0.0 && u[d] <= 1.0)) fail(ErrorKind::Domain, "hypercube_coverage: design outside the unit cube");
        }
        std::array<int, 4> cell{};
        for (int d = 0; d < kDesignDims; ++d) {
            cell[d] = std::min(static_cast<int>(std::floor(u[d] * m)), m - 1);
        }
        cells.insert(cell);
    }
    CoverageReport r;
    r.m = m;
    r.covered = static_cast<int>(cells.size());
    r.total = m * m * m * m;
    r.covered_cells.assign(cells.begin(), cells.end());
    return r;
}

double total_successive_distance(std::span<const UnitPoint> designs) {
    if (designs.empty()) fail(ErrorKind::Domain, "successive distance of an empty design list");
    double total = 0.0;
    for (std::size_t i = 1; i < designs.size(); ++i) total += (designs[i] - designs[i - 1]).norm();
    return total;
}

double normalized_successive_distance(std::span<const UnitPoint> designs, DistanceDenominator denominator) {
    const double total = total_successive_distance(designs);
    if (designs.size() == 1) return 0.0;
    const double n = static_cast<double>(designs.size());
    return total / (denominator == DistanceDenominator::Designs ? n : n - 1.0);
}

SampleSummary summarize(std::span<const double> values) {
    if (values.empty()) fail(ErrorKind::Domain, "summary of an empty sample");
    SampleSummary s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

WelchResult welch_t(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) fail(ErrorKind::Domain, "welch_t needs at least 2 values per sample");
    const SampleSummary sa = summarize(a);
    const SampleSummary sb = summarize(b);
    const double va = sa.sd * sa.sd / static_cast<double>(a.size());
    const double vb = sb.sd * sb.sd / static_cast<double>(b.size());
    const double diff = sa.mean - sb.mean;
    const double se2 = va + vb;
    WelchResult r;
    if (se2 == 0.0) {
        r.t = diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
        r.df = static_cast<double>(a.size() + b.size() - 2);
        return r;
    }
    r.t = diff / std::sqrt(se2);
    r.df = se2 * se2 / (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
    return r;
}

void to_json(nlohmann::json& j, const CoverageReport& r) {
    j = nlohmann::json{{"m", r.m}, {"covered", r.covered}, {"total", r.total}, {"covered_cells", r.covered_cells}};
}

nlohmann::json session_report(const SessionState& session, std::span<const int> m_values, DistanceDenominator denominator) {
    if (session.evaluations.empty()) fail(ErrorKind::Domain, "session has no evaluations");
    std::vector<UnitPoint> visited;
    for (const auto& v : session.visited) visited.push_back(encode_unit(v.design));

    std::vector<ObjectivePoint> points;
    for (const auto& e : session.evaluations) points.push_back(objectives_of(e));
    const auto front = pareto_front(points);
    std::vector<UnitPoint> front_designs;
    for (auto i : front) front_designs.push_back(encode_unit(session.evaluations[i].design));

    nlohmann::json coverage = nlohmann::json::array();
    nlohmann::json pareto_coverage = nlohmann::json::array();
    for (int m : m_values) {
        coverage.push_back(hypercube_coverage(visited, m));
        pareto_coverage.push_back(hypercube_coverage(front_designs, m));
    }

    nlohmann::json picks = nullptr;
    if (session.picks) {
        picks = nlohmann::json::array();
        for (auto i : *session.picks) {
            nlohmann::json p = session.evaluations[i];
            p["index"] = i;
            picks.push_back(std::move(p));
        }
    }

    return nlohmann::json{
        {"id", session.id},
        {"mode", to_string(session.mode)},
        {"stage", to_string(session.stage)},
        {"evaluation_count", session.evaluations.size()},
        {"informal_test_count", session.informal_tests.size()},
        {"visited_count", visited.size()},
        {"coverage", std::move(coverage)},
        {"pareto_coverage", std::move(pareto_coverage)},
        {"pareto_front", front},
        {"total_successive_distance", total_successive_distance(visited)},
        {"normalized_successive_distance", normalized_successive_distance(visited, denominator)},
        {"distance_denominator", denominator == DistanceDenominator::Designs ? "N" : "N-1"},
        {"final_picks", std::move(picks)},
    };
}

}  // namespace hmobo

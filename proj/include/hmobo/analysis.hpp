#pragma once

#include <array>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hmobo/design_domain.hpp"

namespace hmobo {

struct SessionState;

struct CoverageReport {
    int m = 0;
    int covered = 0;
    int total = 0;
    std::vector<std::array<int, 4>> covered_cells;  // sorted lexicographically
};

/// Counts occupied cells of the m^4 grid over [0, 1]^4. Cells are
/// lower-inclusive and upper-exclusive, except that a coordinate equal to 1
/// falls in the top cell.
CoverageReport hypercube_coverage(std::span<const UnitPoint> designs, int m);

/// Sum of Euclidean steps between consecutive designs.
double total_successive_distance(std::span<const UnitPoint> designs);

enum class DistanceDenominator {
    Designs,      // N, the number of design iterations
    Transitions,  // N - 1
};

/// total_successive_distance divided by N (default) or N - 1. Zero for one design.
double normalized_successive_distance(std::span<const UnitPoint> designs,
                                      DistanceDenominator denominator = DistanceDenominator::Designs);

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
};

/// Unequal-variance two-sample t statistic with Welch-Satterthwaite df.
WelchResult welch_t(std::span<const double> a, std::span<const double> b);

struct SampleSummary {
    double mean = 0.0;
    double sd = 0.0;  // n - 1 denominator; 0 for a single value
};
SampleSummary summarize(std::span<const double> values);

/// Exploration and outcome report for a session. Visited designs are every
/// evaluation and informal test in event order; Pareto coverage uses the
/// evaluated designs on the front.
nlohmann::json session_report(const SessionState& session, std::span<const int> m_values,
                              DistanceDenominator denominator = DistanceDenominator::Designs);

void to_json(nlohmann::json& j, const CoverageReport& r);

}  // namespace hmobo

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hmobo/evaluation.hpp"

namespace hmobo {

/// Header expected by the one-shot proposer.
inline constexpr const char* kObservationHeader = "design.D,design.k,design.G,design.A,mean_time_ms,mean_error_cm";

/// Parses observation rows into evaluations (objectives recomputed from the
/// raw metrics). Validation errors name the 1-based row and column.
std::vector<EvaluationResult> read_observations_csv(std::istream& in);

std::string write_observations_csv(const std::vector<EvaluationResult>& evaluations);

}  // namespace hmobo

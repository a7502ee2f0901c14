#pragma once

#include <cmath>

#include "hmobo/error.hpp"

// Go-Go control-display mapping. All distances are radial, in operation-range
// units (shoulder to hand at full extension = 1). The mapping preserves
// direction, so nothing here needs 3-D vectors.

namespace hmobo {

inline constexpr double kDefaultReachCap = 1.3;

template <typename Scalar>
Scalar transfer(Scalar r_real, Scalar threshold, Scalar k) {
    if (r_real < Scalar(0)) fail(ErrorKind::Domain, "transfer: negative hand distance");
    if (r_real <= threshold) return r_real;
    const Scalar excess = r_real - threshold;
    return r_real + k * excess * excess;
}

/// Hand distance that puts the cursor at `cursor`. Unique because the
/// mapping is strictly increasing.
template <typename Scalar>
Scalar inverse_transfer(Scalar cursor, Scalar threshold, Scalar k) {
    if (cursor < Scalar(0)) fail(ErrorKind::Domain, "inverse_transfer: negative cursor distance");
    if (cursor <= threshold || k == Scalar(0)) return cursor;
    // Root >= threshold of k r^2 + (1 - 2kD) r + (kD^2 - d) = 0, written in
    // terms of the excess e = r - D: k e^2 + e - (d - D) = 0. The
    // rationalized form avoids cancellation when k e is small.
    const Scalar rhs = cursor - threshold;
    const Scalar excess = Scalar(2) * rhs / (Scalar(1) + std::sqrt(Scalar(1) + Scalar(4) * k * rhs));
    return threshold + excess;
}

/// dr_c / dr_r. At r_real == threshold the left limit (1) is used.
template <typename Scalar>
Scalar gain(Scalar r_real, Scalar threshold, Scalar k) {
    if (r_real < Scalar(0)) fail(ErrorKind::Domain, "gain: negative hand distance");
    if (r_real <= threshold) return Scalar(1);
    return Scalar(1) + Scalar(2) * k * (r_real - threshold);
}

/// Furthest cursor distance reachable with the hand at r_max.
template <typename Scalar>
Scalar max_reach(Scalar threshold, Scalar k, Scalar r_max = Scalar(kDefaultReachCap)) {
    return transfer(r_max, threshold, k);
}

struct TransferEval {
    double r_real;
    double r_cursor;
    double gain;
};

inline TransferEval evaluate_transfer(double r_real, double threshold, double k) {
    return {r_real, transfer(r_real, threshold, k), gain(r_real, threshold, k)};
}

}  // namespace hmobo

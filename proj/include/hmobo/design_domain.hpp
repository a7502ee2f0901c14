#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

namespace hmobo {

/// Point of the unit cube [0, 1]^4, templated on scalar for use inside Eigen expressions.
template <typename Scalar>
using UnitPointT = Eigen::Matrix<Scalar, 4, 1>;
using UnitPoint = UnitPointT<double>;

inline constexpr int kDesignDims = 4;

/// One Go-Go design: distance threshold D (fraction of operation range),
/// nonlinearity k, activation-vibration gap G in cm (positive = cue before
/// touch) and vibration amplitude A in g.
struct DesignParams {
    double D = 0.0;
    double k = 0.0;
    double G = 0.0;
    double A = 0.0;

    double operator[](int i) const;
    friend bool operator==(const DesignParams&, const DesignParams&) = default;
};

struct Interval {
    double lo;
    double hi;
};

/// Per-coordinate ranges in (D, k, G, A) order. Defaults match the 3D touch case.
struct ParamRanges {
    std::array<Interval, 4> bounds{{{0.0, 1.0}, {0.0, 0.5}, {-5.0, 15.0}, {0.0, 2.6}}};

    static const ParamRanges& defaults();
};

inline constexpr std::array<std::string_view, 4> kParamNames{"D", "k", "G", "A"};

/// Throws ErrorKind::Range naming the first offending coordinate.
void validate(const DesignParams& p, const ParamRanges& ranges = ParamRanges::defaults());
void validate_unit(const UnitPoint& u);

UnitPoint encode_unit(const DesignParams& p, const ParamRanges& ranges = ParamRanges::defaults());
DesignParams decode_unit(const UnitPoint& u, const ParamRanges& ranges = ParamRanges::defaults());

struct TargetSpec {
    double inclination_deg = 30.0;
    double azimuth_deg = 0.0;
    double distance_units = 0.5;
    double width_cm = 3.0;

    friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

inline constexpr std::array<double, 3> kInclinationsDeg{30.0, 45.0, 60.0};
inline constexpr std::array<double, 8> kAzimuthsDeg{0.0, 45.0, 90.0, 135.0, 180.0, 225.0, 270.0, 315.0};
inline constexpr std::array<double, 4> kDistancesUnits{0.5, 1.0, 1.5, 2.0};
inline constexpr std::array<double, 3> kWidthsCm{3.0, 4.0, 5.0};
inline constexpr std::size_t kTrialsPerBlock = 36;
inline constexpr std::size_t kTrialsPerStratum = 3;

/// All 288 targets, inclination-major then azimuth, distance, width.
std::vector<TargetSpec> full_variation_set();

/// 36 targets balanced over the 12 (distance, width) strata, three each, in a
/// seeded shuffled order. Direction is drawn with replacement per trial.
std::vector<TargetSpec> generate_trial_block(std::uint64_t seed);

void to_json(nlohmann::json& j, const DesignParams& p);
void from_json(const nlohmann::json& j, DesignParams& p);
void to_json(nlohmann::json& j, const TargetSpec& t);

}  // namespace hmobo

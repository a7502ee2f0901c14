#include "hmobo/design_domain.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hmobo/error.hpp"
#include "hmobo/random.hpp"

namespace hmobo {

double DesignParams::operator[](int i) const {
    switch (i) {
        case 0: return D;
        case 1: return k;
        case 2: return G;
        case 3: return A;
        default: fail(ErrorKind::Domain, "design coordinate index out of range");
    }
}

const ParamRanges& ParamRanges::defaults() {
    static const ParamRanges r;
    return r;
}

void validate(const DesignParams& p, const ParamRanges& ranges) {
    for (int i = 0; i < kDesignDims; ++i) {
        const double v = p[i];
        const auto [lo, hi] = ranges.bounds[i];
        if (!(v >= lo && v <= hi)) {
            std::ostringstream os;
            os << "design parameter " << kParamNames[i] << "=" << v << " outside [" << lo << ", " << hi << "]";
            fail(ErrorKind::Range, os.str());
        }
    }
}

void validate_unit(const UnitPoint& u) {
    for (int i = 0; i < kDesignDims; ++i) {
        if (!(u[i] >= 0.0 && u[i] <= 1.0)) {
            std::ostringstream os;
            os << "unit coordinate " << i << " (" << kParamNames[i] << ")=" << u[i] << " outside [0, 1]";
            fail(ErrorKind::Range, os.str());
        }
    }
}

UnitPoint encode_unit(const DesignParams& p, const ParamRanges& ranges) {
    validate(p, ranges);
    UnitPoint u;
    for (int i = 0; i < kDesignDims; ++i) {
        const auto [lo, hi] = ranges.bounds[i];
        u[i] = (p[i] - lo) / (hi - lo);
    }
    return u;
}

DesignParams decode_unit(const UnitPoint& u, const ParamRanges& ranges) {
    validate_unit(u);
    std::array<double, 4> x{};
    for (int i = 0; i < kDesignDims; ++i) {
        const auto [lo, hi] = ranges.bounds[i];
        // Pin the corners so u = 0/1 decode to the exact bounds.
        x[i] = u[i] == 1.0 ? hi : lo + u[i] * (hi - lo);
    }
    return {x[0], x[1], x[2], x[3]};
}

std::vector<TargetSpec> full_variation_set() {
    std::vector<TargetSpec> out;
    out.reserve(kInclinationsDeg.size() * kAzimuthsDeg.size() * kDistancesUnits.size() * kWidthsCm.size());
    for (double inc : kInclinationsDeg)
        for (double az : kAzimuthsDeg)
            for (double d : kDistancesUnits)
                for (double w : kWidthsCm) out.push_back({inc, az, d, w});
    return out;
}

std::vector<TargetSpec> generate_trial_block(std::uint64_t seed) {
    Rng rng = Rng::stream({seed, 0x7472696CULL});
    constexpr std::uint64_t directions = kInclinationsDeg.size() * kAzimuthsDeg.size();

    std::vector<TargetSpec> block;
    block.reserve(kTrialsPerBlock);
    for (double d : kDistancesUnits) {
        for (double w : kWidthsCm) {
            for (std::size_t rep = 0; rep < kTrialsPerStratum; ++rep) {
                const std::uint64_t dir = rng.below(directions);
                block.push_back({kInclinationsDeg[dir / kAzimuthsDeg.size()], kAzimuthsDeg[dir % kAzimuthsDeg.size()], d, w});
            }
        }
    }
    // Fisher-Yates, spelled out so the order is the same on every standard library.
    for (std::size_t i = block.size() - 1; i > 0; --i) {
        std::swap(block[i], block[rng.below(i + 1)]);
    }
    return block;
}

void to_json(nlohmann::json& j, const DesignParams& p) {
    j = nlohmann::json{{"D", p.D}, {"k", p.k}, {"G", p.G}, {"A", p.A}};
}

void from_json(const nlohmann::json& j, DesignParams& p) {
    if (!j.is_object()) fail(ErrorKind::Validation, "design must be a JSON object");
    for (auto name : kParamNames) {
        auto it = j.find(std::string(name));
        if (it == j.end() || !it->is_number())
            fail(ErrorKind::Validation, "design field '" + std::string(name) + "' missing or not a number");
    }
    p.D = j.at("D").get<double>();
    p.k = j.at("k").get<double>();
    p.G = j.at("G").get<double>();
    p.A = j.at("A").get<double>();
}

void to_json(nlohmann::json& j, const TargetSpec& t) {
    j = nlohmann::json{{"inclination_deg", t.inclination_deg},
                       {"azimuth_deg", t.azimuth_deg},
                       {"distance_units", t.distance_units},
                       {"width_cm", t.width_cm}};
}

}  // namespace hmobo

#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace hmobo {

/// SplitMix64 step. Used both as a seeder and to hash stream keys.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Mixes a list of integer keys into a single 64-bit seed. Order matters.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys);

/// xoshiro256++ generator seeded through SplitMix64, with Box-Muller normals.
///
/// Satisfies UniformRandomBitGenerator so it can drive <algorithm> shuffles,
/// although the project shuffles with its own Fisher-Yates for cross-library
/// reproducibility.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0);

    /// Independent stream for a tuple of keys (e.g. seed, session, trial index).
    static Rng stream(std::initializer_list<std::uint64_t> keys) { return Rng(derive_seed(keys)); }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() { return next(); }
    result_type next();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();
    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);
    /// Standard normal via Box-Muller; the second variate is cached.
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }

private:
    std::array<std::uint64_t, 4> s_{};
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace hmobo

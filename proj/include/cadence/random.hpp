#pragma once

#include <cstdint>
#include <random>

namespace cadence {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent sub-seeds from
// (seed, index) so results never depend on draw order across workers.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline double gaussian(Rng& rng, double mean = 0.0, double sigma = 1.0) {
    return std::normal_distribution<double>(mean, sigma)(rng);
}

}  // namespace cadence

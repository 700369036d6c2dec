#pragma once

#include <cstdint>
#include <random>

namespace childpen::rng {

/// splitmix64 finalizer.
constexpr std::uint64_t mix(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of the independent stream for (seed, index); used per Monte Carlo
/// draw and per bootstrap round so results do not depend on scheduling.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix(mix(seed) ^ mix(index + 0x632BE59BD9B4E019ULL));
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(stream_seed(seed, index));
}

/// Uniform on [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& gen) { return double(gen() >> 11) * 0x1.0p-53; }

}  // namespace childpen::rng

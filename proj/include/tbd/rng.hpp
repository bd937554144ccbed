#pragma once

#include <cstdint>
#include <random>

namespace tbd {

using Rng = std::mt19937_64;

/// Roles for independent random streams within one Monte Carlo trial.
enum class StreamRole : std::uint64_t {
    truth = 1,
    frames = 2,
    filter = 3,
    extraction = 4,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives a generator keyed by (seed, trial, role). Streams for different
/// keys are decorrelated, so trials can run in any order or in parallel.
inline Rng make_stream(std::uint64_t seed, std::uint64_t trial, StreamRole role) {
    std::uint64_t key = splitmix64(seed);
    key = splitmix64(key ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
    key = splitmix64(key ^ static_cast<std::uint64_t>(role));
    std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
    return Rng(seq);
}

}  // namespace tbd

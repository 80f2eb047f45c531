#pragma once

#include <cstdint>
#include <random>

namespace fixedb::rng {

// SplitMix64 finalizer. Bijective on 64-bit integers, good avalanche.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based substream derivation: the engine for logical stream
// (seed, i, j, ...) is seeded with mix64 applied along the index path.
// Streams are a pure function of the indices, so work scheduled across
// any number of workers, in any order, draws identical variates.
inline constexpr std::uint64_t substream(std::uint64_t seed, std::uint64_t idx) noexcept {
    return mix64(seed ^ (0x9e3779b97f4a7c15ULL + idx * 0xbf58476d1ce4e5b9ULL));
}

inline constexpr std::uint64_t substream(std::uint64_t seed, std::uint64_t i, std::uint64_t j) noexcept {
    return substream(substream(seed, i), j);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64{seed};
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t idx) {
    return std::mt19937_64{substream(seed, idx)};
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t i, std::uint64_t j) {
    return std::mt19937_64{substream(seed, i, j)};
}

} // namespace fixedb::rng

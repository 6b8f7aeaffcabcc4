#pragma once

// Random draws used across sampling code. mt19937_64 output is pinned by the
// standard, and the helpers below avoid std::uniform_*_distribution (whose
// draw sequences differ between standard libraries), so a fixed seed gives
// identical behavior everywhere.

#include <cstdint>
#include <random>

namespace kgrule {

using Rng = std::mt19937_64;

// Unbiased draw from [0, n).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
        std::uint64_t r = rng();
        if (r >= threshold) return r % n;
    }
}

// Draw from [0, 1) with 53 random bits.
inline double uniform_real01(Rng& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

// Independent per-worker stream: splitmix64 over (seed, index).
inline Rng seeded_rng(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
}

}  // namespace kgrule

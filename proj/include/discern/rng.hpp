#pragma once

#include <cstdint>
#include <random>

// Seeded randomness helpers. std::uniform_int_distribution and friends are
// not required to produce the same streams across standard library
// implementations, so anything that feeds results (k-means init, scan cells)
// draws through these instead.

namespace discern::rng {

using Engine = std::mt19937_64;

/// splitmix64 finalizer; good avalanche for stream derivation.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Derive an independent stream seed from a base seed and a cell id,
/// e.g. (k, run) in a scan grid. Distinct ids give unrelated streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(mix64(mix64(base) ^ a) ^ b);
}

/// Unbiased draw from [0, n). Rejection sampling on the raw 64-bit output.
inline std::size_t uniform_index(Engine& rng, std::size_t n) {
    const std::uint64_t span = n;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return static_cast<std::size_t>(x % span);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Engine& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace discern::rng

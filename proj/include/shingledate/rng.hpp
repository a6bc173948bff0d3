#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace shingledate {

// std::uniform_int_distribution and std::shuffle are implementation-defined,
// so seeded runs would not reproduce across standard libraries. Everything
// random in this project goes through the helpers below, which pin the exact
// draw sequence on top of the fully specified mt19937_64 engine.

// Uniform integer in [0, n), n >= 1. Rejection sampling, no modulo bias.
inline std::uint64_t bounded_uniform(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Fisher-Yates with the pinned bounded draw.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(bounded_uniform(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace shingledate

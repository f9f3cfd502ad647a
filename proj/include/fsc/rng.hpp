#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fsc/error.hpp"

namespace fsc {

// Deterministic sampling helpers on top of mt19937_64. The standard pins the
// mt19937_64 output sequence but not the distribution adaptors, so every
// mapping from raw engine output to a sample is spelled out here. Identical
// seeds give identical samples on every platform.

inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Unbiased index in [0, n) via rejection sampling.
inline std::size_t uniform_index(std::mt19937_64& g, std::size_t n) {
    if (n == 0) throw parameter_error("uniform_index: empty range");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = g();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
}

// Index drawn proportionally to non-negative weights. Zero total weight is
// the caller's problem; returns npos so callers can fall back.
inline std::size_t weighted_index(std::mt19937_64& g, std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) return static_cast<std::size_t>(-1);
    const double r = uniform01(g) * total;
    double acc = 0.0;
    std::size_t last_positive = static_cast<std::size_t>(-1);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i];
        last_positive = i;
        if (r < acc) return i;
    }
    return last_positive;  // r landed on the rounding edge
}

}  // namespace fsc

#pragma once

#include <cstdint>
#include <random>

// Hand-rolled draws on top of mt19937_64 so runs are bit-reproducible
// across standard libraries (std::uniform_*_distribution is not).

namespace udgfl {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return Rng(seed * 0x9e3779b97f4a7c15ULL + stream + 1);
}

// Uniform integer in [lo, hi] by rejection.
inline std::int64_t rng_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(rng());  // full range
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return lo + static_cast<std::int64_t>(v % span);
}

// Uniform real in [0, 1).
inline double rng_real(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double rng_real(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * rng_real(rng);
}

// Standard normal via Box-Muller (deterministic, two draws per call).
inline double rng_normal(Rng& rng) {
    double u1 = rng_real(rng);
    while (u1 == 0.0) u1 = rng_real(rng);
    const double u2 = rng_real(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace udgfl

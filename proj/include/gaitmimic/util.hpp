#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <vector>

namespace gaitmimic {

/// splitmix64 step; the standard way we turn (seed, index...) tuples into
/// independent RNG seeds so parallel evaluation order cannot matter.
inline std::uint64_t seed_mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b) {
    return seed_mix(seed_mix(a) ^ b);
}

inline std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return seed_mix(seed_mix(a, b) ^ c);
}

/// Run fn(i) for i in [0, n) across a small worker pool. Results must be
/// written to index i only; the outcome is then schedule-independent.
void parallel_for_index(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Uniform draw in [0, 1) with an explicit bit mapping, so generated values
/// are identical across standard libraries.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + uniform01(rng) * (hi - lo);
}

/// Standard normal via Box-Muller on the explicit uniform mapping; avoids
/// the implementation-defined std::normal_distribution sequence.
inline double gaussian(std::mt19937_64& rng) {
    const double u1 = std::max(uniform01(rng), 0x1.0p-60);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline double mean_of(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double pearson_correlation(std::span<const double> a, std::span<const double> b);

/// Remove 2*pi jumps so an angle series accumulates full rotations.
std::vector<double> unwrap_angles(std::span<const double> wrapped);

/// FNV-1a over a byte string; used for config hashes in run manifests.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace gaitmimic

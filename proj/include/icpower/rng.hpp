#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace icpower {

using Rng = std::mt19937_64;

// splitmix64 finalizer; whitens raw seeds and drives substream derivation.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent substream seed from a master seed and an index
// path, e.g. derive_seed(master, {point, realization}). Components that
// must share randomness (paired channel draws across methods) use the
// same path; everything else gets its own path.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(master);
    for (std::uint64_t idx : path) s = mix64(s ^ mix64(idx));
    return s;
}

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

// 53-bit uniform in [0, 1).
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Inverse-CDF exponential draw; log1p keeps precision for small u.
inline double exponential(Rng& rng, double mean) {
    return -mean * std::log1p(-uniform01(rng));
}

// Standard normal via Box-Muller; the second variate of the pair is
// discarded so the draw count per call is fixed.
inline double gauss(Rng& rng) {
    double u = uniform01(rng);
    while (u == 0.0) u = uniform01(rng);
    const double v = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * 3.14159265358979323846 * v);
}

// Uniform integer in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

} // namespace icpower

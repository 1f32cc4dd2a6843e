#pragma once

#include <cstdint>

namespace latail {

// splitmix64 finalizer; the basis of the counter-based per-site sampler.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline double uniform01_from_bits(std::uint64_t z) {
    // in (0, 1): 53 mantissa bits plus half-step offset
    return (z >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

/// Uniform(0,1) deviate keyed by (seed, stream, lattice site); pure function
/// of its arguments, so sampling order and worker count never matter.
inline double site_uniform(std::uint64_t seed, std::uint64_t stream, long gx,
                           long gy) {
    std::uint64_t h = splitmix64(seed ^ 0x5851F42D4C957F2DULL);
    h = splitmix64(h ^ stream);
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(gx)));
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(gy)));
    return uniform01_from_bits(h);
}

} // namespace latail

#pragma once

#include <cstdint>

namespace zal::rng {

// Counter-based generator: sample i of a run depends only on (seed, i, stream),
// so serial and parallel executions produce bit-identical draws.
// The mixer is the splitmix64 finalizer.

inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t at(uint64_t seed, uint64_t index, uint64_t stream = 0) {
    uint64_t z = mix64(seed ^ 0x123456789abcdefULL);
    z = mix64(z ^ index);
    z = mix64(z ^ (stream * 0xda942042e4dd58b5ULL));
    return z;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(uint64_t seed, uint64_t index, uint64_t stream = 0) {
    return static_cast<double>(at(seed, index, stream) >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double uniform(uint64_t seed, uint64_t index, double lo, double hi,
                      uint64_t stream = 0) {
    return lo + (hi - lo) * uniform01(seed, index, stream);
}

} // namespace zal::rng

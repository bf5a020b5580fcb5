#pragma once
#include <cstdint>

namespace eikjohn {

/// Small deterministic RNG (splitmix64). Used wherever reproducibility across
/// platforms and thread counts matters: each logical task derives its own
/// stream from (seed, task index), so results never depend on scheduling.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    /// Independent stream for task `index` under a master seed.
    SplitMix64(std::uint64_t seed, std::uint64_t index)
        : SplitMix64(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1))) {
        next();
    }

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_double() { return double(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return n ? next() % n : 0; }
};

} // namespace eikjohn

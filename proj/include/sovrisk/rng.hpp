#pragma once

#include <cstdint>
#include <random>

namespace sovrisk {

// splitmix64, used to derive independent per-work-item seeds so that
// parallel Monte Carlo stays deterministic regardless of scheduling.
inline uint64_t split_seed(uint64_t seed, uint64_t item) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (item + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

inline Rng make_rng(uint64_t seed, uint64_t item = 0) {
    return Rng(split_seed(seed, item));
}

} // namespace sovrisk

#pragma once

#include <cstdint>
#include <random>

namespace semclip {

// splitmix64 finalizer; mixes (seed, stream) pairs into independent seeds so
// per-item generators can run in any order and still be reproducible.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(~stream));
}

using Rng = std::mt19937_64;

inline Rng make_rng(uint64_t seed, uint64_t stream = 0) {
    return Rng(derive_seed(seed, stream));
}

}  // namespace semclip

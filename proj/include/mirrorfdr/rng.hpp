#pragma once

#include <cstdint>
#include <random>

namespace mirrorfdr {

// splitmix64 finalizer; used to derive independent substreams from
// (seed, stream, substream) triples so parallel workers never share state.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0,
                                std::uint64_t sub = 0) {
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ splitmix64(stream + 0x1234567fULL));
    s = splitmix64(s ^ splitmix64(sub + 0xabcdef01ULL));
    return std::mt19937_64(s);
}

}  // namespace mirrorfdr

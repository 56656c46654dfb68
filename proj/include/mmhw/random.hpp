#pragma once

#include <cstdint>
#include <random>

namespace mmhw {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Child seed for stream `index` of `parent`. Depends only on the pair, so
/// work can be split and reordered freely without changing any stream.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(parent) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_stream(std::uint64_t seed) { return Rng{seed}; }

// Fixed stream tags used when a single realization needs several
// independent streams.
namespace stream {
inline constexpr std::uint64_t positions = 1;
inline constexpr std::uint64_t kinds = 2;
inline constexpr std::uint64_t modes = 3;
inline constexpr std::uint64_t steering = 4;
inline constexpr std::uint64_t fading = 5;
inline constexpr std::uint64_t mobility = 6;
}  // namespace stream

}  // namespace mmhw

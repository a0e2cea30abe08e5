#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace sentirec::detail {

// std::*_distribution output is implementation-defined; these helpers only
// rely on the engine's raw stream so results are identical across toolchains.
using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream indices; every consumer of a shared seed draws from its own stream.
inline constexpr std::uint64_t kStreamSplitPositive = 0;
inline constexpr std::uint64_t kStreamSplitNegative = 1;
inline constexpr std::uint64_t kStreamDummy = 2;
inline constexpr std::uint64_t kStreamHoldout = 3;
inline constexpr std::uint64_t kStreamLatent = 4;
inline constexpr std::uint64_t kStreamKeep = 5;
inline constexpr std::uint64_t kStreamSvm = 7;

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
  return Engine(splitmix64(seed ^ splitmix64(stream + 0x5851f42d4c957f2dULL)));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound), bound > 0. Rejection sampling, no modulo bias.
inline std::uint64_t uniform_below(Engine& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return draw % bound;
}

template <typename T>
void shuffle(std::vector<T>& items, Engine& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace sentirec::detail

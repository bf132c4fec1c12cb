#pragma once

// Seeded randomness. Every stochastic draw in the library comes from an
// Engine built by make_engine(seed, stream...), so any sub-task (one
// experiment, one calibration graph) can be replayed without running the
// others.
//
// Counter scheme: the engine seed is the SplitMix64 chain
//   s_0 = mix(seed), s_{k+1} = mix(s_k ^ stream_k)
// over the stream tags, e.g. (seed, kExperimentStream, k) for experiment k.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace redraw {

using Engine = std::mt19937_64;

inline constexpr std::uint64_t kExperimentStream = 0x45585045524d4e54ULL;  // "EXPERMNT"
inline constexpr std::uint64_t kGraphStream = 0x4752415048455247ULL;       // "GRAPHERG"

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> streams) {
  std::uint64_t s = splitmix64(seed);
  for (std::uint64_t tag : streams) s = splitmix64(s ^ tag);
  return s;
}

inline Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> streams = {}) {
  return Engine(derive_seed(seed, streams));
}

/// Uniform double in [lo, hi) from the top 53 bits of one engine output.
/// Unlike std::uniform_real_distribution this is identical on every
/// standard library.
inline double uniform(Engine& engine, double lo, double hi) {
  const double unit = static_cast<double>(engine() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

}  // namespace redraw

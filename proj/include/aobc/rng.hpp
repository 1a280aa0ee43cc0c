#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace aobc {

/// Random stream used by every sampler. Streams are value types: copy one to
/// fork an identical sequence.
using RandomStream = std::mt19937_64;

/// Purpose labels used as the last element of a stream label path.
enum class StreamPurpose : std::uint64_t {
  geometry = 1,
  channel = 2,
  delay = 3,
  oracle = 4,
};

/// Deterministic substream for a label path below `master_seed`. Identical
/// label paths give identical streams; distinct paths are mixed through a
/// 64-bit finalizer so sibling streams are statistically independent.
RandomStream derive_stream(std::uint64_t master_seed,
                           std::span<const std::uint64_t> labels);

RandomStream derive_stream(std::uint64_t master_seed,
                           std::initializer_list<std::uint64_t> labels);

constexpr std::uint64_t label(StreamPurpose purpose) {
  return static_cast<std::uint64_t>(purpose);
}

/// Unit-mean exponential draw (Rayleigh fading power).
inline double draw_fading(RandomStream& rng) {
  return std::exponential_distribution<double>(1.0)(rng);
}

inline bool draw_bernoulli(RandomStream& rng, double p) {
  return std::bernoulli_distribution(p)(rng);
}

}  // namespace aobc

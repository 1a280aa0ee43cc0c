#include "aobc/rng.hpp"

#include <array>

namespace aobc {
namespace {

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RandomStream derive_stream(std::uint64_t master_seed,
                           std::span<const std::uint64_t> labels) {
  // Two independent lanes so the seed_seq gets 128 bits of path entropy.
  std::uint64_t a = mix64(master_seed);
  std::uint64_t b = mix64(master_seed ^ 0x6a09e667f3bcc909ULL);
  std::uint64_t depth = 0;
  for (std::uint64_t l : labels) {
    ++depth;
    a = mix64(a ^ mix64(l + depth * 0x9e3779b97f4a7c15ULL));
    b = mix64(b + mix64(l ^ (depth << 32) ^ 0xbb67ae8584caa73bULL));
  }
  // Path length enters so that {x} and {x, 0} differ.
  a = mix64(a ^ depth);
  std::array<std::uint32_t, 4> words{
      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  std::seed_seq seq(words.begin(), words.end());
  return RandomStream(seq);
}

RandomStream derive_stream(std::uint64_t master_seed,
                           std::initializer_list<std::uint64_t> labels) {
  return derive_stream(master_seed,
                       std::span<const std::uint64_t>(labels.begin(), labels.size()));
}

}  // namespace aobc

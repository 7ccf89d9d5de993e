#pragma once

#include <cstdint>
#include <string_view>

namespace reef {

/// SplitMix64 (Steele, Lea & Flood). Every random draw in the toolkit comes
/// from this generator so that results are reproducible from the seed alone:
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// uniform01() = (next() >> 11) * 2^-53, in [0, 1).
/// below(n) rejects draws under (2^64 mod n) and returns next() mod n.
/// normal() is one Box-Muller cosine branch from two uniforms, no caching.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  double uniform01();
  double uniform(double lo, double hi);
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  std::uint64_t state_;
};

/// Mixes a label into a root seed: splitmix64 finalizer of
/// root ^ fnv1a64(label). Used for stage seeds such as "split" or "tree/3".
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

}  // namespace reef

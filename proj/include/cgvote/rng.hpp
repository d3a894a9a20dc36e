#pragma once

#include <cstdint>

namespace cgvote {

/// SplitMix64 (Steele, Lea, Flood 2014; Vigna's public-domain constants).
/// Seedable, splittable, 64-bit state. Used everywhere a reproducible
/// stream is needed so results do not depend on the standard library's
/// distribution implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in the open interval (0, 1): 53 random bits plus a
  /// half-ulp offset, so 0 and 1 are never produced.
  double next_open01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform double in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Integer in [0, bound).
  std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

  /// Derive an independent child stream. The child seed is the SplitMix64
  /// mix of (seed + golden_gamma * (stream + 1)), so distinct stream ids
  /// give decorrelated sequences and the parent state is untouched.
  SplitMix64 derive(std::uint64_t stream) const {
    std::uint64_t z = seed_base() + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return SplitMix64(z ^ (z >> 31));
  }

 private:
  std::uint64_t seed_base() const { return state_; }
  std::uint64_t state_;
};

}  // namespace cgvote

#pragma once

#include <cstdint>

namespace blockheat {

/// SplitMix64 stream. Pinned so that a seed reproduces the same lattice on any
/// platform and in any implementation that follows the same recipe.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += kGamma;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double strictly inside (0, 1): the top 53 bits, offset by half an ulp.
  constexpr double uniform01() noexcept {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Skip `count` draws in O(1).
  constexpr void discard(std::uint64_t count) noexcept { state_ += count * kGamma; }

  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace blockheat

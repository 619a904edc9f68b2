#pragma once

#include <cstdint>

namespace gmerton {

/// SplitMix64 finalizer (Steele, Lea & Flood). Bijective 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a master seed and up to three
/// indices: h = mix(mix(mix(master ^ tag) ^ a) ^ b).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                          std::uint64_t a, std::uint64_t b = 0) noexcept;

/// SplitMix64 stream: state advances by the golden-ratio increment and every
/// output is mix64(state). Fully specified, so streams match across
/// platforms and compilers.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform double in the open interval (0, 1): (top 53 bits + 0.5) / 2^53.
  double uniform() noexcept;

 private:
  std::uint64_t state_;
};

/// Standard normal variates via the Box-Muller transform on a SplitMix64
/// stream; both variates of each pair are used.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) noexcept : bits_(seed) {}

  double next() noexcept;

 private:
  SplitMix64 bits_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gmerton

#include "gmerton/rng.hpp"

#include <cmath>
#include <numbers>

namespace gmerton {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                          std::uint64_t a, std::uint64_t b) noexcept {
  std::uint64_t h = mix64(master ^ (tag * 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ (a + 0x632be59bd9b4e019ULL));
  return mix64(h ^ (b + 0x85157af5ULL));
}

double SplitMix64::uniform() noexcept {
  constexpr double kScale = 0x1.0p-53;
  return (static_cast<double>(next() >> 11) + 0.5) * kScale;
}

double NormalStream::next() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = bits_.uniform();
  const double u2 = bits_.uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace gmerton

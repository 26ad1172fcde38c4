#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace firesim {

/// Splittable SplitMix64 generator. Child streams are derived from the parent
/// state and a tag, so adding a new consumer never shifts existing streams.
/// Floating-point conversion is done here rather than through <random>
/// distributions, whose output is implementation-defined.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  SplitRng split(std::string_view tag) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : tag) {
      h ^= ch;
      h *= 0x100000001b3ull;
    }
    SplitRng mixer(state_ ^ h);
    return SplitRng(mixer.next());
  }

  /// Uniform in [0, 1).
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (one value per call).
  double normal() noexcept {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace firesim

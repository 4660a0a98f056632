#pragma once

#include <cstdint>

namespace fracpf {

/// Counter-based generator: the k-th draw for a given seed is a pure function
/// of (seed, k), so streams are reproducible and can be skipped into.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t bits(std::uint64_t counter) const {
    return mix(seed_ + (counter + 1) * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform in the open interval (0, 1).
  double uniform_open(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t next_bits() { return bits(counter_++); }
  double next_open() { return uniform_open(counter_++); }
  /// Uniform in [lo, hi].
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_open(); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace fracpf

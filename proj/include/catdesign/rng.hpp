#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace catdesign {

/// mt19937_64 with distributions written out here, so a seed gives the same
/// stream on every standard library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform in [0, n); n > 0.
  std::size_t index(std::size_t n);
  bool bernoulli(double p) { return uniform01() < p; }

private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer applied to a combination of two values.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace catdesign

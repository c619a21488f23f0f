#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace longtail {

// Deterministic random source. std::mt19937_64 output is fully specified by
// the standard, but the standard distributions are not, so the transforms
// (uniform, normal, bounded ints, shuffle) are implemented here to make
// streams reproducible across compilers and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform_in(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform in (0, 1]; never returns 0 so it is safe under log().
  double uniform_open0() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal();

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t uniform_index(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  // Fisher-Yates with this engine; std::shuffle is not portable.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// Stable sub-seed derivation so independent streams (dataset, shuffling,
// augmentation noise, ...) can be drawn from one master seed without
// interfering with each other.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace longtail

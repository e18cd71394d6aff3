#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace evembed {

/// Deterministic random source.  std::mt19937_64 has a fully specified
/// algorithm, and every distribution here is hand-rolled on top of its raw
/// output, so identical seeds give identical streams on every platform and
/// standard library.  (The std::*_distribution classes are implementation
/// defined and would break byte-level reproducibility.)
class Rng {
public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n).  Modulo bias is negligible for the pool
  /// sizes used here and keeps the draw count per call fixed at one.
  uint64_t uniform_index(uint64_t n) { return eng_() % n; }

  /// Knuth's product-of-uniforms method; intended for small means.
  uint32_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    double limit = std::exp(-mean);
    uint32_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform01();
    } while (p > limit);
    return k - 1;
  }

  /// Box-Muller without caching, so each call consumes exactly two draws.
  double normal(double mean, double stddev) {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * M_PI * u2);
  }

  /// Fisher-Yates shuffle using uniform_index.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_index(i));
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  std::mt19937_64 eng_;
};

/// splitmix64 finalizer; used to derive independent stream seeds from a
/// master seed plus coordinates (e.g. slice and machine index).
inline uint64_t mix_seed(uint64_t a, uint64_t b = 0, uint64_t c = 0) {
  uint64_t x = a + 0x9E3779B97F4A7C15ull * (b + 1) + 0xBF58476D1CE4E5B9ull * (c + 1);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

/// Draws an index from a fixed discrete distribution via its cumulative
/// weights.  One uniform01 call per draw.
class WeightedSampler {
public:
  explicit WeightedSampler(const std::vector<double>& weights) {
    cumulative_.reserve(weights.size());
    double run = 0.0;
    for (double w : weights) {
      run += w;
      cumulative_.push_back(run);
    }
    total_ = run;
  }

  size_t draw(Rng& rng) const {
    double u = rng.uniform01() * total_;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) return cumulative_.size() - 1;
    return static_cast<size_t>(it - cumulative_.begin());
  }

private:
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

}  // namespace evembed

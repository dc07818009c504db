#pragma once

// Deterministic random streams. Draw helpers avoid std:: distributions so
// that the same seed yields the same sequence with every standard library.

#include <cstdint>
#include <random>

namespace donation_ca {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Replicate seed derivation:
///   mix64(base, a, b) = splitmix64(splitmix64(splitmix64(base) ^ a) ^ b)
/// Each (axis index, replicate index) pair gets its own stream, so the
/// order in which workers pick up jobs cannot change any result.
constexpr std::uint64_t mix64(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ b);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// True with probability p. Degenerate probabilities consume no draws.
  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform() < p;
  }

  /// Uniform integer in [0, bound), bound > 0. Rejection sampling, unbiased.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  std::size_t index(std::size_t bound) { return static_cast<std::size_t>(below(bound)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace donation_ca

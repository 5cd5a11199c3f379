#pragma once

#include <cstdint>

namespace iparc {

/// Deterministic 64-bit generator (splitmix64). Everything that needs
/// randomness draws from one of these so that suites, samples and searches
/// replay exactly from a seed, on any platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Unbiased draw in [0, n). n must be > 0.
  uint64_t below(uint64_t n) {
    // Rejection sampling over the largest multiple of n.
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t r;
    do {
      r = next();
    } while (r >= limit);
    return r % n;
  }

  int below_int(int n) { return static_cast<int>(below(static_cast<uint64_t>(n))); }

  /// Uniform draw in [lo, hi], inclusive.
  int between(int lo, int hi) { return lo + below_int(hi - lo + 1); }

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return unit() < p; }

  /// Derives an independent stream; forking with different ids from the same
  /// parent state yields unrelated generators.
  Rng fork(uint64_t stream_id) {
    Rng child(state_ ^ (0xA0761D6478BD642Full * (stream_id + 1)));
    child.next();
    return child;
  }

 private:
  uint64_t state_;
};

}  // namespace iparc

#pragma once

#include <cstdint>
#include <vector>

namespace cateval {

/// SplitMix64. All sampling in the toolkit goes through this so that a run
/// seed reproduces byte-identical artifacts on any platform; the standard
/// <random> distributions are implementation-defined and would not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    // Debiased multiply-shift (Lemire).
    std::uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    std::uint64_t lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t t = (0 - n) % n;
      while (lo < t) {
        x = next();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool coin() { return (next() & 1) != 0; }

  /// Fisher-Yates over indices [0, n).
  std::vector<std::size_t> shuffled_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(idx[i - 1], idx[j]);
    }
    return idx;
  }

  /// Child stream derived from this seed and a salt; keeps per-object
  /// sampling independent of corpus iteration order.
  static Rng derive(std::uint64_t seed, std::uint64_t salt) {
    Rng mix(seed ^ (0x9e3779b97f4a7c15ull * (salt + 1)));
    mix.next();
    return mix;
  }

 private:
  std::uint64_t state_;
};

}  // namespace cateval

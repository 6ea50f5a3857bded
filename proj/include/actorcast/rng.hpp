#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace actorcast {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for a stochastic unit identified by (base seed, label, indices).
/// The label is hashed with FNV-1a so seeds are stable across platforms and builds.
std::uint64_t derive_seed(std::uint64_t base, std::string_view label, std::uint64_t a = 0,
                          std::uint64_t b = 0, std::uint64_t c = 0);

/// Portable random stream: std::mt19937_64 (fully specified by the standard) with
/// hand-rolled bounded integers and uniforms, since std distributions are
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (cosine branch only).
  double normal();

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::span<T> values) {
    for (size_t i = values.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  /// `count` distinct indices from [0, n), returned in increasing order.
  std::vector<size_t> sample_without_replacement(size_t n, size_t count);

 private:
  std::mt19937_64 engine_;
};

}  // namespace actorcast

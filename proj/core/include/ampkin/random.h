#pragma once

#include <cstdint>
#include <random>

namespace ampkin {

/// Seeded generator with platform-independent draws.
///
/// std::*_distribution output differs between standard libraries, so the
/// conversions from raw 64-bit words are done here. Same seed, same stream,
/// on every toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Per-sample seed for batch work: stable under any scheduling order.
constexpr std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) { return seed ^ index; }

}  // namespace ampkin

#pragma once

#include <cstdint>

namespace flr {

/// Counter-based generator: output k is SplitMix64's finaliser applied to
/// seed + k * golden. Streams derived with split() are independent of the
/// parent's position, so parallel work can be seeded by task index.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();
  /// Uniform on (0, 1), never exactly 0 or 1.
  double uniform();
  /// Standard normal via Box-Muller (pairs cached).
  double normal();

  CounterRng split(std::uint64_t stream) const;
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t z);

}  // namespace flr

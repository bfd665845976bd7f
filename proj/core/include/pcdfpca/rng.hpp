#pragma once

#include <cstdint>

namespace pcdfpca {

/// Portable random source: xoshiro256** seeded through splitmix64, with
/// Box-Muller normals. Output depends only on the seed, never on the
/// standard library in use.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream for replication `index` of a run seeded with `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64() noexcept;
  /// Uniform on (0, 1), 53 bits of resolution.
  double uniform() noexcept;
  double normal() noexcept;
  double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

 private:
  std::uint64_t s_[4];
  double cached_ = 0.0;
  bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

}  // namespace pcdfpca

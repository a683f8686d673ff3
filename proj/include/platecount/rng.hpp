#pragma once

#include <cstdint>

namespace platecount {

/// splitmix64 output for the i-th element of the stream started at `seed`.
/// The stream state advances by the published increment 0x9e3779b97f4a7c15,
/// so random access is O(1): scene i of a suite derives its seed directly.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index);

/// xoshiro256** with the reference seeding procedure (four successive
/// splitmix64 outputs). Chosen for portability: identical output on every
/// platform for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform double in [0,1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, n), n >= 1.
  int uniform_int(int n);

  /// Approximate standard normal: mean-centered sum of 12 uniforms
  /// (Irwin-Hall). Uses only IEEE-exact additions, so the byte-identical
  /// determinism contract holds across platforms, unlike Box-Muller.
  double gaussian();

 private:
  std::uint64_t state_[4];
};

}  // namespace platecount

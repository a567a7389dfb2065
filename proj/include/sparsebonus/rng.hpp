#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace sparsebonus {

/// splitmix64 output function applied to a single word.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256++ stream that remembers how it was derived.
///
/// Streams form a tree: a root is seeded from a 64-bit experiment seed and
/// children are derived by mixing a label into the parent's path hash. Deriving
/// never touches the parent's state, so the order in which children are
/// created has no effect on any stream.
class Rng {
 public:
  static Rng seed_root(std::uint64_t seed);

  /// Child stream identified by `label`; depends only on seed_path() and label.
  [[nodiscard]] Rng derive(std::uint64_t label) const;

  std::uint64_t next_u64() noexcept;
  /// Top 53 bits scaled by 2^-53, so the result lies in [0, 1).
  double next_uniform() noexcept;
  /// Box-Muller, one variate per call (the sine branch is discarded).
  double next_normal() noexcept;
  /// Uniform integer in [0, n). Lemire's multiply-shift with rejection.
  std::uint64_t next_below(std::uint64_t n) noexcept;

  const std::vector<std::uint64_t>& seed_path() const noexcept { return path_; }
  const std::array<std::uint64_t, 4>& state() const noexcept { return s_; }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  Rng(std::uint64_t path_hash, std::vector<std::uint64_t> path);

  std::array<std::uint64_t, 4> s_{};
  std::uint64_t path_hash_ = 0;
  std::vector<std::uint64_t> path_;
};

/// Rebuilds the stream at its initial position from a recorded seed path.
Rng rng_from_path(const std::vector<std::uint64_t>& path);

}  // namespace sparsebonus

#include "sparsebonus/rng.hpp"

#include <cmath>
#include <numbers>

#include "sparsebonus/error.hpp"

namespace sparsebonus {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

std::uint64_t child_hash(std::uint64_t parent, std::uint64_t label) noexcept {
  return splitmix64_mix(parent ^ splitmix64_mix(label + kGolden));
}

}  // namespace

Rng::Rng(std::uint64_t path_hash, std::vector<std::uint64_t> path)
    : path_hash_(path_hash), path_(std::move(path)) {
  std::uint64_t x = path_hash;
  for (auto& word : s_) {
    x += kGolden;
    word = splitmix64_mix(x);
  }
  // splitmix64 never yields four zero words from consecutive increments,
  // but keep the all-zero state impossible regardless.
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = kGolden;
}

Rng Rng::seed_root(std::uint64_t seed) { return Rng(seed, {seed}); }

Rng Rng::derive(std::uint64_t label) const {
  auto path = path_;
  path.push_back(label);
  return Rng(child_hash(path_hash_, label), std::move(path));
}

Rng rng_from_path(const std::vector<std::uint64_t>& path) {
  require(!path.empty(), "rng_from_path: empty seed path");
  Rng r = Rng::seed_root(path.front());
  for (std::size_t i = 1; i < path.size(); ++i) r = r.derive(path[i]);
  return r;
}

std::uint64_t Rng::next_u64() noexcept {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::next_uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_normal() noexcept {
  // 1 - u lies in (0, 1], keeping log finite.
  const double u1 = 1.0 - next_uniform();
  const double u2 = next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::next_below(std::uint64_t n) noexcept {
  if (n == 0) return 0;
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = -n % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace sparsebonus

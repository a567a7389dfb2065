#include <cmath>
#include <vector>

#include "doctest.h"
#include "sparsebonus/rng.hpp"
#include "sparsebonus/verify.hpp"

using sparsebonus::Rng;

namespace {

std::vector<std::uint64_t> draws(Rng r, int n) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < n; ++i) out.push_back(r.next_u64());
  return out;
}

}  // namespace

TEST_CASE("seed_root is a pure function of the seed") {
  CHECK(draws(Rng::seed_root(7), 1000) == draws(Rng::seed_root(7), 1000));
  CHECK(Rng::seed_root(7).next_u64() != Rng::seed_root(8).next_u64());
}

TEST_CASE("derive: pure, label-sensitive, order-sensitive, parent untouched") {
  const Rng root = Rng::seed_root(42);
  const Rng before = root;
  CHECK(draws(root.derive(1), 100) == draws(root.derive(1), 100));
  CHECK(draws(root.derive(1), 100) != draws(root.derive(2), 100));
  CHECK(draws(root.derive(1).derive(2), 100) != draws(root.derive(2).derive(1), 100));
  CHECK(root == before);

  const Rng child = root.derive(3).derive(9);
  CHECK(child.seed_path() == std::vector<std::uint64_t>{42, 3, 9});
  CHECK(sparsebonus::rng_from_path(child.seed_path()) == child);

  // Consuming a parent does not change later children.
  Rng consumed = root;
  consumed.next_u64();
  CHECK(draws(consumed.derive(5), 10) == draws(root.derive(5), 10));
}

TEST_CASE("next_uniform: range and moments") {
  Rng r = Rng::seed_root(1);
  const int n = 1'000'000;
  double sum = 0.0;
  int high = 0;
  bool in_range = true;
  for (int i = 0; i < n; ++i) {
    const double u = r.next_uniform();
    in_range = in_range && u >= 0.0 && u < 1.0;
    sum += u;
    high += u >= 0.9;
  }
  CHECK(in_range);
  CHECK(std::abs(sum / n - 0.5) <= 0.001);
  CHECK(std::abs(static_cast<double>(high) / n - 0.1) <= 0.001);
}

TEST_CASE("next_uniform: KS statistic below 0.006 for 1e5 draws") {
  Rng r = Rng::seed_root(2);
  std::vector<double> xs(100'000);
  for (double& x : xs) x = r.next_uniform();
  CHECK(sparsebonus::ks_uniform_statistic(xs) < 0.006);
}

TEST_CASE("next_normal: moments and determinism") {
  Rng r = Rng::seed_root(3);
  const int n = 1'000'000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.next_normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) <= 0.004);
  CHECK(std::abs(sq / n - mean * mean - 1.0) <= 0.01);

  Rng a = Rng::seed_root(4), b = Rng::seed_root(4);
  CHECK(a.next_normal() == b.next_normal());
}

TEST_CASE("property: mixed uniform/normal sequences replay identically") {
  Rng gen = Rng::seed_root(99);
  for (int trial = 0; trial < 50; ++trial) {
    const Rng start = Rng::seed_root(gen.next_u64()).derive(gen.next_u64());
    std::vector<int> ops(200);
    for (int& op : ops) op = static_cast<int>(gen.next_below(3));
    auto run = [&](Rng r) {
      std::vector<double> out;
      for (int op : ops) {
        if (op == 0) out.push_back(r.next_uniform());
        else if (op == 1) out.push_back(r.next_normal());
        else out.push_back(static_cast<double>(r.next_below(17)));
      }
      return out;
    };
    CHECK(run(start) == run(start));
  }
}

TEST_CASE("next_below stays in range and covers every value") {
  Rng r = Rng::seed_root(5);
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = r.next_below(7);
    REQUIRE(v < 7);
    ++seen[v];
  }
  for (int c : seen) CHECK(c > 800);
}

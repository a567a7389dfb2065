#include <cmath>
#include <set>

#include "doctest.h"
#include "sparsebonus/error.hpp"
#include "sparsebonus/her_replay.hpp"
#include "sparsebonus/verify.hpp"

using namespace sparsebonus;

namespace {

constexpr int kHorizon = 60;

// Walks toward x = k*0.05 over k steps, then holds; the desired goal is the
// held position, so the episode achieves from step k on.
std::vector<Transition> reach_and_hold(int k, const BonusConfig& cfg, Rng& rng) {
  std::vector<Transition> ep;
  const double goal_x = 0.05 * k;
  Observation obs{{0.0, 0.0}, {0.0, 0.0}, {goal_x, 0.0}};
  for (int t = 0; t < kHorizon; ++t) {
    Observation next = obs;
    if (t < k) next.achieved_goal[0] = next.state[0] = 0.05 * (t + 1);
    const double base = compute_reward(next.achieved_goal, next.desired_goal, 0.05);
    Transition tr;
    tr.obs = obs;
    tr.action = {t < k ? 1.0 : 0.0, 0.0};
    tr.base_reward = base;
    tr.bonus_applied = apply_bonus(base, base == 0.0, cfg, rng).bonus_applied;
    tr.next_obs = next;
    tr.achieved_next = base == 0.0;
    tr.t = t;
    ep.push_back(std::move(tr));
    obs = std::move(next);
  }
  return ep;
}

}  // namespace

TEST_CASE("store_episode: ring semantics and length check") {
  ReplayStore store(kHorizon, 3);
  Rng r = Rng::seed_root(1);
  for (int e = 0; e < 4; ++e) store.store_episode(synthetic_episode(kHorizon, BonusConfig::reference(), r));
  CHECK(store.size() == 3);
  CHECK(store.stored_total() == 4);
  std::set<std::uint64_t> ids;
  for (std::size_t i = 0; i < store.size(); ++i) ids.insert(store.episode_id(i));
  CHECK(ids == std::set<std::uint64_t>{1, 2, 3});

  auto short_ep = synthetic_episode(kHorizon, BonusConfig::reference(), r);
  short_ep.pop_back();
  CHECK_THROWS_AS(store.store_episode(short_ep), ContractViolation);
}

TEST_CASE("sample_batch: empty store is an error") {
  ReplayStore store(kHorizon, 3);
  Rng r = Rng::seed_root(2);
  CHECK_THROWS_AS(store.sample_batch(8, 0.8, 0.05, r), ContractViolation);
}

TEST_CASE("relabel ratio 0 reproduces stored shaped rewards") {
  ReplayStore store(kHorizon, 10);
  Rng r = Rng::seed_root(3);
  const BonusConfig cfg{0.5, -5, Stage::NotGoal};
  std::vector<std::vector<Transition>> eps;
  for (int e = 0; e < 10; ++e) {
    eps.push_back(synthetic_episode(kHorizon, cfg, r));
    store.store_episode(eps.back());
  }
  const auto b = store.sample_batch(2000, 0.0, 0.05, r);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& tr = eps[static_cast<std::size_t>(b.episode_index[i])][static_cast<std::size_t>(b.step_index[i])];
    CHECK_FALSE(b.relabeled[i]);
    CHECK(b.reward[i] == tr.shaped_reward());
    CHECK(b.goal(i, 0) == tr.obs.desired_goal[0]);
    CHECK(b.done[i] == 0.0);
  }
}

TEST_CASE("relabeled fraction is 0.800 +- 0.004 over 1e5 samples") {
  ReplayStore store(kHorizon, 20);
  Rng r = Rng::seed_root(4);
  for (int e = 0; e < 20; ++e) store.store_episode(synthetic_episode(kHorizon, BonusConfig::reference(), r));
  const auto b = store.sample_batch(100'000, 0.8, 0.05, r);
  long long relabeled = 0;
  for (bool x : b.relabeled) relabeled += x;
  CHECK(std::abs(static_cast<double>(relabeled) / 1e5 - 0.8) <= 0.004);
}

TEST_CASE("future indices satisfy t < t' <= horizon and goal matches ag[t']") {
  ReplayStore store(kHorizon, 5);
  Rng r = Rng::seed_root(5);
  std::vector<std::vector<Transition>> eps;
  for (int e = 0; e < 5; ++e) {
    eps.push_back(synthetic_episode(kHorizon, BonusConfig::reference(), r));
    store.store_episode(eps.back());
  }
  const auto b = store.sample_batch(20'000, 1.0, 0.05, r);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const int t = b.step_index[i], f = b.future_index[i];
    REQUIRE(b.relabeled[i]);
    CHECK(t < f);
    CHECK(f <= kHorizon);
    const auto& ep = eps[static_cast<std::size_t>(b.episode_index[i])];
    const auto& ag = f == kHorizon ? ep.back().next_obs.achieved_goal
                                   : ep[static_cast<std::size_t>(f)].obs.achieved_goal;
    CHECK(b.goal(i, 0) == ag[0]);
    CHECK(b.next_goal(i, 0) == ag[0]);
  }
}

TEST_CASE("future index histogram is uniform on (t, horizon]") {
  for (int t : {0, 30, 58}) {
    Rng r = Rng::seed_root(6 + static_cast<std::uint64_t>(t));
    std::vector<long long> counts(static_cast<std::size_t>(kHorizon - t), 0);
    for (int i = 0; i < 100'000; ++i) ++counts[static_cast<std::size_t>(draw_future_index(t, kHorizon, r) - t - 1)];
    CHECK(chi_square_uniform_pvalue(counts) > 0.01);
  }
  Rng r = Rng::seed_root(1);
  CHECK(draw_future_index(59, 60, r) == 60);
  CHECK_THROWS_AS(draw_future_index(60, 60, r), ContractViolation);
}

TEST_CASE("reach-and-hold: relabeled rewards after the goal is reached are 0") {
  ReplayStore store(kHorizon, 1);
  Rng r = Rng::seed_root(7);
  const int k = 10;
  store.store_episode(reach_and_hold(k, BonusConfig::reference(), r));
  const auto b = store.sample_batch(5000, 1.0, 0.05, r);
  int checked = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b.step_index[i] >= k) {
      CHECK(b.reward[i] == 0.0);
      ++checked;
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("bonus isolation: 0:-15:NG never leaks into relabeled rewards") {
  const BonusConfig cfg = BonusConfig::parse("0:-15:NG");
  ReplayStore store(kHorizon, 4);
  Rng r = Rng::seed_root(8);
  for (int e = 0; e < 4; ++e) store.store_episode(synthetic_episode(kHorizon, cfg, r));
  const auto b = store.sample_batch(4096, 0.8, 0.05, r);
  std::set<double> relabeled_values, kept_values;
  for (std::size_t i = 0; i < b.size(); ++i)
    (b.relabeled[i] ? relabeled_values : kept_values).insert(b.reward[i]);
  CHECK(relabeled_values == std::set<double>{-1.0, 0.0});
  CHECK(kept_values == std::set<double>{-16.0});
}

TEST_CASE("fixed_zero reward mode pins relabeled rewards to 0") {
  ReplayStore store(kHorizon, 4);
  Rng r = Rng::seed_root(9);
  for (int e = 0; e < 4; ++e) store.store_episode(synthetic_episode(kHorizon, BonusConfig::reference(), r));
  const auto b = store.sample_batch(4096, 0.8, 0.05, r, HerRewardMode::FixedZero);
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b.relabeled[i]) CHECK(b.reward[i] == 0.0);
}

#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "sparsebonus/envs.hpp"
#include "sparsebonus/matrix.hpp"
#include "sparsebonus/rng.hpp"

namespace sparsebonus {

struct Transition {
  Observation obs;
  Vec action;
  double base_reward = -1.0;
  double bonus_applied = 0.0;
  Observation next_obs;
  bool achieved_next = false;
  int t = 0;

  double shaped_reward() const { return base_reward + bonus_applied; }
};

enum class HerRewardMode { Recompute, FixedZero };

struct TrainingBatch {
  Matrix obs_state;
  Matrix goal;
  Matrix action;
  std::vector<double> reward;
  Matrix next_obs_state;
  Matrix next_goal;
  std::vector<double> done;
  std::vector<bool> relabeled;
  // Diagnostics: source episode slot, step t, and future index t' (-1 if kept).
  std::vector<int> episode_index;
  std::vector<int> step_index;
  std::vector<int> future_index;

  std::size_t size() const { return reward.size(); }
};

/// Uniform draw of t' in (t, horizon].
int draw_future_index(int t, int horizon, Rng& rng);

/// Ring of complete episodes with HER "future" relabeling.
///
/// Each episode keeps horizon + 1 observations; transition t goes from obs[t]
/// to obs[t + 1]. Bonuses are stored apart from the base reward so relabeled
/// samples can drop them.
class ReplayStore {
 public:
  ReplayStore(int horizon, std::size_t capacity = 1000);

  /// Requires exactly `horizon` transitions with t = 0, 1, ... in order.
  void store_episode(const std::vector<Transition>& episode);

  /// Samples (episode, t) uniformly; each entry is relabeled with probability
  /// relabel_ratio to a goal achieved at t' in (t, horizon].
  TrainingBatch sample_batch(std::size_t batch_size, double relabel_ratio, double tolerance,
                             Rng& rng, HerRewardMode mode = HerRewardMode::Recompute) const;

  std::size_t size() const noexcept { return episodes_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  int horizon() const noexcept { return horizon_; }
  /// Total episodes ever stored, including evicted ones.
  std::uint64_t stored_total() const noexcept { return stored_total_; }
  /// Id of the episode held in slot i (its position in storage order).
  std::uint64_t episode_id(std::size_t slot) const { return episodes_.at(slot).id; }

 private:
  struct Episode {
    std::uint64_t id = 0;
    std::vector<Observation> obs;  // horizon + 1
    std::vector<Vec> actions;
    std::vector<double> base_reward;
    std::vector<double> bonus;
  };

  int horizon_;
  std::size_t capacity_;
  std::uint64_t stored_total_ = 0;
  std::deque<Episode> episodes_;
};

}  // namespace sparsebonus

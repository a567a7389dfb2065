#include "sparsebonus/her_replay.hpp"

#include <algorithm>

#include "sparsebonus/error.hpp"

namespace sparsebonus {

int draw_future_index(int t, int horizon, Rng& rng) {
  require(t >= 0 && t < horizon, "draw_future_index: t outside [0, horizon)");
  return t + 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(horizon - t)));
}

ReplayStore::ReplayStore(int horizon, std::size_t capacity)
    : horizon_(horizon), capacity_(capacity) {
  require(horizon > 0, "ReplayStore: horizon must be positive");
  require(capacity > 0, "ReplayStore: capacity must be positive");
}

void ReplayStore::store_episode(const std::vector<Transition>& episode) {
  require(static_cast<int>(episode.size()) == horizon_,
          "store_episode: episode length must equal the horizon");
  Episode ep;
  ep.id = stored_total_;
  ep.obs.reserve(episode.size() + 1);
  ep.actions.reserve(episode.size());
  for (std::size_t i = 0; i < episode.size(); ++i) {
    const auto& tr = episode[i];
    require(tr.t == static_cast<int>(i), "store_episode: transitions out of order");
    require(tr.base_reward == 0.0 || tr.base_reward == -1.0,
            "store_episode: base reward must be -1 or 0");
    ep.obs.push_back(tr.obs);
    ep.actions.push_back(tr.action);
    ep.base_reward.push_back(tr.base_reward);
    ep.bonus.push_back(tr.bonus_applied);
  }
  ep.obs.push_back(episode.back().next_obs);

  if (episodes_.size() == capacity_) episodes_.pop_front();
  episodes_.push_back(std::move(ep));
  ++stored_total_;
}

TrainingBatch ReplayStore::sample_batch(std::size_t batch_size, double relabel_ratio,
                                        double tolerance, Rng& rng, HerRewardMode mode) const {
  require(!episodes_.empty(), "sample_batch: replay store is empty");
  require(relabel_ratio >= 0.0 && relabel_ratio <= 1.0,
          "sample_batch: relabel_ratio outside [0, 1]");

  const auto& first = episodes_.front().obs.front();
  const std::size_t sdim = first.state.size();
  const std::size_t gdim = first.desired_goal.size();
  const std::size_t adim = episodes_.front().actions.front().size();

  TrainingBatch b;
  b.obs_state = Matrix(batch_size, sdim);
  b.goal = Matrix(batch_size, gdim);
  b.action = Matrix(batch_size, adim);
  b.next_obs_state = Matrix(batch_size, sdim);
  b.next_goal = Matrix(batch_size, gdim);
  b.reward.resize(batch_size);
  b.done.assign(batch_size, 0.0);
  b.relabeled.resize(batch_size);
  b.episode_index.resize(batch_size);
  b.step_index.resize(batch_size);
  b.future_index.resize(batch_size);

  for (std::size_t i = 0; i < batch_size; ++i) {
    const auto slot = static_cast<std::size_t>(rng.next_below(episodes_.size()));
    const auto t = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(horizon_)));
    const Episode& ep = episodes_[slot];
    const bool relabel = rng.next_uniform() < relabel_ratio;

    const Observation& o = ep.obs[static_cast<std::size_t>(t)];
    const Observation& o2 = ep.obs[static_cast<std::size_t>(t) + 1];
    std::ranges::copy(o.state, b.obs_state.row(i).begin());
    std::ranges::copy(o2.state, b.next_obs_state.row(i).begin());
    std::ranges::copy(ep.actions[static_cast<std::size_t>(t)], b.action.row(i).begin());

    const Vec* goal = &o.desired_goal;
    int future = -1;
    double reward = ep.base_reward[static_cast<std::size_t>(t)] + ep.bonus[static_cast<std::size_t>(t)];
    if (relabel) {
      future = draw_future_index(t, horizon_, rng);
      goal = &ep.obs[static_cast<std::size_t>(future)].achieved_goal;
      reward = mode == HerRewardMode::FixedZero
                   ? 0.0
                   : compute_reward(o2.achieved_goal, *goal, tolerance);
    }
    std::ranges::copy(*goal, b.goal.row(i).begin());
    std::ranges::copy(*goal, b.next_goal.row(i).begin());
    b.reward[i] = reward;
    b.relabeled[i] = relabel;
    b.episode_index[i] = static_cast<int>(slot);
    b.step_index[i] = t;
    b.future_index[i] = future;
  }
  return b;
}

}  // namespace sparsebonus

#pragma once

#include <string>
#include <string_view>

#include "sparsebonus/rng.hpp"

namespace sparsebonus {

/// Window in which the bonus may fire.
enum class Stage { NotGoal, Goal, Both, Reference };

std::string_view stage_label(Stage s);  // "NG", "G", "B", "REF"

/// Stochastic bonus: with probability 1 - p an eligible step receives +b.
struct BonusConfig {
  double p = 1.0;  // probability of keeping the nominal reward
  int b = 0;
  Stage stage = Stage::Reference;

  static BonusConfig reference() { return {}; }

  /// Parses "P:B:N", P in percent (0-100), B a signed integer, N one of
  /// NG, G, B, BOTH, REF. Throws ConfigError.
  static BonusConfig parse(std::string_view text);
  /// Canonical "P:B:N" label; positive bonuses carry a '+' sign.
  std::string label() const;

  /// Percent as an integer when p is a whole percentage.
  double percent() const { return p * 100.0; }

  friend bool operator==(const BonusConfig&, const BonusConfig&) = default;
};

struct ShapedReward {
  double total = 0.0;
  double base = 0.0;
  double bonus_applied = 0.0;
};

bool bonus_eligible(const BonusConfig& cfg, bool achieved);

/// Draws u ~ U[0,1) only on eligible steps; bonus iff u >= p.
ShapedReward apply_bonus(double base, bool achieved, const BonusConfig& cfg, Rng& rng);

/// base + b(1 - p) when eligible, base otherwise.
double expected_step_reward(double base, bool eligible, const BonusConfig& cfg);

/// Closed-form mean reward seen by the learner for a transition stage.
///
/// achieved = false: -1 + b(1 - p) for an NG-eligible config (the extrinsic
/// stream). achieved = true: (1 - her_ratio) * b(1 - p) when G-eligible, since
/// relabeled transitions sit at 0; 0.2 b(1 - p) at the nominal ratio.
double expected_training_reward(const BonusConfig& cfg, double her_ratio, bool achieved);

/// Monte-Carlo counterpart of expected_training_reward. For achieved = true it
/// simulates a minibatch where a her_ratio fraction of entries is relabeled
/// (reward 0) and the rest go through apply_bonus; for achieved = false it
/// samples the shaped extrinsic stream.
double monte_carlo_training_reward(const BonusConfig& cfg, double her_ratio, bool achieved,
                                   long long samples, Rng& rng);

/// Expected shaped return of an episode that is NG for steps_to_goal steps and
/// G for the remaining horizon - steps_to_goal.
double expected_episode_return(const BonusConfig& cfg, int horizon, int steps_to_goal);

/// Smallest and largest per-step reward the learner can see under cfg,
/// including relabeled rewards in {-1, 0}.
struct RewardRange {
  double min = -1.0;
  double max = 0.0;
};
RewardRange reward_range(const BonusConfig& cfg);

}  // namespace sparsebonus

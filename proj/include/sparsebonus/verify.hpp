#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparsebonus/her_replay.hpp"
#include "sparsebonus/reward_shaping.hpp"

namespace sparsebonus {

struct StatCheck {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  // For tests whose criterion is not |measured - expected| <= tolerance
  // (chi-square p-value, KS statistic), a short description of the rule.
  std::string rule;
};

struct VerificationReport {
  std::vector<StatCheck> checks;
  bool passed() const;
  std::string format() const;
};

struct VerifyOptions {
  long long iterations = 1'000'000;
  std::uint64_t seed = 12345;
  // Mix ratio assumed by the goal-stage oracle. The simulated minibatch always
  // uses 0.8; setting this elsewhere is a negative control.
  double oracle_her_ratio = 0.8;
};

/// Probabilities used in the experiment grid, as fractions.
const std::vector<double>& grid_probabilities();
/// Bonus values used in the experiment grid.
const std::vector<int>& grid_bonuses();

/// Fraction of `n` eligible apply_bonus calls that received the bonus.
double bonus_frequency(const BonusConfig& cfg, long long n, Rng& rng);
/// Mean shaped reward over `n` eligible calls at the given base reward.
double shaped_mean(const BonusConfig& cfg, double base, long long n, Rng& rng);

/// Chi-square goodness of fit of observed counts against a uniform law; returns
/// the upper-tail p-value.
double chi_square_uniform_pvalue(const std::vector<long long>& counts);

/// Kolmogorov-Smirnov statistic of samples against U[0, 1).
double ks_uniform_statistic(std::vector<double> samples);

/// Episodes that never reach their goal, for replay statistics. The achieved
/// goal walks so relabeled rewards are a mix of -1 and 0.
std::vector<Transition> synthetic_episode(int horizon, const BonusConfig& cfg, Rng& rng);

VerificationReport verify_statistics(const VerifyOptions& options);

}  // namespace sparsebonus

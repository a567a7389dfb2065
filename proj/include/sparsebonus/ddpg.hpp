#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sparsebonus/envs.hpp"
#include "sparsebonus/her_replay.hpp"
#include "sparsebonus/mlp.hpp"
#include "sparsebonus/reward_shaping.hpp"

namespace sparsebonus {

struct AgentParams {
  double gamma = 0.98;
  double tau = 0.05;
  double actor_lr = 1e-3;
  double critic_lr = 1e-3;
  double noise_sigma = 0.2;  // Gaussian action noise, fraction of the bound
  double random_eps = 0.3;   // probability of a uniform random action
  double action_l2 = 1.0;
  std::vector<int> hidden = {64, 64, 64};
  double norm_clip = 5.0;
  double norm_eps = 0.01;

  void validate() const;
  friend bool operator==(const AgentParams&, const AgentParams&) = default;
};

/// Anything that maps observations to actions.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual Vec act(const Observation& obs, bool explore, Rng& rng) const = 0;
};

struct Losses {
  double critic = 0.0;
  double actor = 0.0;
};

/// Clip bounds for Bellman targets under a bonus config:
/// [r_min / (1 - gamma), max(0, r_max) / (1 - gamma)].
struct TargetClip {
  double lo = 0.0;
  double hi = 0.0;
};
TargetClip target_clip(const BonusConfig& cfg, double gamma);

/// Concatenates batch states and goals into the network input layout.
Matrix state_goal(const Matrix& state, const Matrix& goal);

/// y = clip(r + gamma (1 - done) Q'(s'||g, pi'(s'||g))). Inputs are normalised
/// with `norm`; actions enter the critic divided by the action bound.
std::vector<double> critic_target(const TrainingBatch& batch, const Mlp& target_actor,
                                  const Mlp& target_critic, const Normalizer& norm,
                                  double gamma, TargetClip clip);

class DdpgAgent final : public Policy {
 public:
  DdpgAgent(const EnvSpec& spec, AgentParams params, const BonusConfig& bonus, Rng& init_rng);

  /// pi(normalize(s||g)) scaled to the bound. Exploration adds sigma-scaled
  /// Gaussian noise, then with probability eps swaps in a uniform action.
  Vec act(const Observation& obs, bool explore, Rng& rng) const override;

  /// One critic step, one actor step, then Polyak on both targets.
  Losses train_batch(const TrainingBatch& batch);

  std::vector<double> critic_targets(const TrainingBatch& batch) const;

  /// Feeds rollout observations (state || desired goal) to the normaliser.
  void update_normalizer(const std::vector<Observation>& observations);

  const Mlp& actor() const noexcept { return actor_; }
  const Mlp& critic() const noexcept { return critic_; }
  const Mlp& target_actor() const noexcept { return target_actor_; }
  const Mlp& target_critic() const noexcept { return target_critic_; }
  Mlp& actor() noexcept { return actor_; }
  Mlp& critic() noexcept { return critic_; }
  const Normalizer& normalizer() const noexcept { return norm_; }
  Normalizer& normalizer() noexcept { return norm_; }
  const AgentParams& params() const noexcept { return params_; }
  const EnvSpec& env_spec() const noexcept { return spec_; }
  TargetClip clip() const noexcept { return clip_; }

  void load_targets(const Mlp& actor, const Mlp& critic);
  /// Sets the Polyak rate (tests use 0 and 1).
  void set_tau(double tau);

 private:
  EnvSpec spec_;
  AgentParams params_;
  TargetClip clip_;
  Mlp actor_, critic_, target_actor_, target_critic_;
  Adam actor_opt_, critic_opt_;
  Normalizer norm_;
};

/// Everything needed to rebuild a trained policy.
///
/// Text format, one token group per line; all reals are C99 hex floats so the
/// round trip is exact:
///   sparsebonus-checkpoint 1
///   env <name>
///   bonus <P:B:N>
///   seed_path <n> <u64>...
///   agent <gamma> <tau> <actor_lr> <critic_lr> <sigma> <eps> <l2> <clip> <norm_eps>
///   hidden <n> <size>...
///   net <actor|critic|target_actor|target_critic> <count> <value>...
///   normalizer <dim> <count> <mean>... <m2>...
///   end
struct Checkpoint {
  std::string env;
  BonusConfig bonus;
  std::vector<std::uint64_t> seed_path;
  AgentParams params;
  std::vector<double> actor, critic, target_actor, target_critic;
  Normalizer normalizer;

  static Checkpoint from_agent(const DdpgAgent& agent, std::string env, const BonusConfig& bonus,
                               std::vector<std::uint64_t> seed_path);
  /// Rebuilds an agent for the checkpoint's environment.
  DdpgAgent to_agent() const;

  void write(std::ostream& out) const;
  static Checkpoint read(std::istream& in);
};

}  // namespace sparsebonus

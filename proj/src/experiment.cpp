#include "sparsebonus/experiment.hpp"

#include <charconv>
#include <sstream>

#include "sparsebonus/error.hpp"

namespace sparsebonus {
namespace {

// Labels for the per-purpose child streams of a training seed.
enum StreamLabel : std::uint64_t {
  kInitStream = 1,
  kEnvStream = 2,
  kPolicyStream = 3,
  kBonusStream = 4,
  kReplayStream = 5,
};

double mean_of(double sum, std::size_t n) { return n == 0 ? 0.0 : sum / static_cast<double>(n); }

}  // namespace

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out(kMetricsHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.epoch);
    for (double v : {r.train_sr, r.train_return, r.test_sr, r.test_return, r.cum_train_sr}) {
      out += ',';
      out += format_real(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<MetricsRow> parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader)
    throw ConfigError("metrics CSV: missing or wrong header");
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> fields;
    std::size_t start = 0;
    while (start <= line.size()) {
      const auto comma = line.find(',', start);
      const auto end = comma == std::string::npos ? line.size() : comma;
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(line.data() + start, line.data() + end, v);
      if (ec != std::errc{} || ptr != line.data() + end)
        throw ConfigError("metrics CSV: bad number in '" + line + "'");
      fields.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 6) throw ConfigError("metrics CSV: expected 6 columns in '" + line + "'");
    rows.push_back({static_cast<int>(fields[0]), fields[1], fields[2], fields[3], fields[4], fields[5]});
  }
  return rows;
}

EpisodeOutcome run_episode(Environment& env, const Policy& policy, const BonusConfig& bonus,
                           bool explore, RolloutMode mode, EpisodeStreams& streams) {
  if (mode == RolloutMode::Evaluate)
    require(bonus.stage == Stage::Reference && !explore,
            "run_episode: evaluation requires the REF config and no exploration");
  const int horizon = env.spec().horizon;
  EpisodeOutcome out;
  out.transitions.reserve(static_cast<std::size_t>(horizon));
  out.observations.reserve(static_cast<std::size_t>(horizon) + 1);

  Observation obs = env.reset(streams.env);
  out.observations.push_back(obs);
  for (int t = 0; t < horizon; ++t) {
    Vec action = policy.act(obs, explore, streams.policy);
    StepResult step = env.step(action);
    ShapedReward shaped{step.base_reward, step.base_reward, 0.0};
    if (mode == RolloutMode::Train)
      shaped = apply_bonus(step.base_reward, step.achieved, bonus, streams.bonus);
    out.shaped_return += shaped.total;

    Transition tr;
    tr.obs = std::move(obs);
    tr.action = std::move(action);
    tr.base_reward = step.base_reward;
    tr.bonus_applied = shaped.bonus_applied;
    tr.next_obs = step.observation;
    tr.achieved_next = step.achieved;
    tr.t = t;
    out.transitions.push_back(std::move(tr));

    obs = std::move(step.observation);
    out.observations.push_back(obs);
    if (t + 1 == horizon) out.success = step.achieved;
  }
  return out;
}

EvalResult evaluate(const Policy& policy, const Environment& prototype,
                    const std::vector<std::uint64_t>& test_seeds, int episodes_per_seed) {
  require(episodes_per_seed > 0, "evaluate: episodes_per_seed must be positive");
  EvalResult result;
  double success_sum = 0.0, return_sum = 0.0;
  std::size_t episodes = 0;
  const BonusConfig ref = BonusConfig::reference();
  for (std::uint64_t seed : test_seeds) {
    const Rng root = Rng::seed_root(seed);
    auto env = prototype.clone();
    double seed_success = 0.0, seed_return = 0.0;
    for (int e = 0; e < episodes_per_seed; ++e) {
      EpisodeStreams streams{root.derive(static_cast<std::uint64_t>(e)), root, root};
      const auto ep = run_episode(*env, policy, ref, false, RolloutMode::Evaluate, streams);
      seed_success += ep.success ? 1.0 : 0.0;
      seed_return += ep.shaped_return;
    }
    const auto n = static_cast<std::size_t>(episodes_per_seed);
    result.per_seed.push_back({seed, mean_of(seed_success, n), mean_of(seed_return, n)});
    success_sum += seed_success;
    return_sum += seed_return;
    episodes += n;
  }
  result.success_rate = mean_of(success_sum, episodes);
  result.mean_return = mean_of(return_sum, episodes);
  return result;
}

TrainResult train(const ExperimentConfig& config,
                  const std::function<void(const MetricsRow&)>& on_epoch) {
  config.validate();
  const Rng root = Rng::seed_root(config.train_seed);
  auto env = make_environment(config.env);
  const EnvSpec& spec = env->spec();

  Rng init_rng = root.derive(kInitStream);
  DdpgAgent agent(spec, config.agent, config.bonus, init_rng);
  ReplayStore store(spec.horizon, config.her.capacity);
  Rng replay_rng = root.derive(kReplayStream);
  const Rng env_root = root.derive(kEnvStream);
  const Rng policy_root = root.derive(kPolicyStream);
  const Rng bonus_root = root.derive(kBonusStream);

  TrainResult result;
  const Schedule& s = config.schedule;
  std::uint64_t episode_index = 0;
  double cum_sr_sum = 0.0;
  for (int epoch = 0; epoch < s.epochs; ++epoch) {
    double success = 0.0, shaped = 0.0;
    std::size_t episodes = 0;
    for (int cycle = 0; cycle < s.cycles; ++cycle) {
      for (int e = 0; e < s.episodes_per_cycle; ++e, ++episode_index) {
        EpisodeStreams streams{env_root.derive(episode_index), policy_root.derive(episode_index),
                               bonus_root.derive(episode_index)};
        auto ep = run_episode(*env, agent, config.bonus, true, RolloutMode::Train, streams);
        success += ep.success ? 1.0 : 0.0;
        shaped += ep.shaped_return;
        ++episodes;
        store.store_episode(ep.transitions);
        agent.update_normalizer(ep.observations);
      }
      for (int k = 0; k < s.optimizer_steps_per_cycle; ++k) {
        if (store.size() == 0) break;
        const auto batch = store.sample_batch(config.her.batch_size, config.her.relabel_ratio,
                                              spec.tolerance, replay_rng, config.her.reward_mode);
        agent.train_batch(batch);
      }
    }
    const EvalResult eval = evaluate(agent, *env, config.test_seeds, s.test_episodes);
    MetricsRow row;
    row.epoch = epoch;
    row.train_sr = mean_of(success, episodes);
    row.train_return = mean_of(shaped, episodes);
    row.test_sr = eval.success_rate;
    row.test_return = eval.mean_return;
    cum_sr_sum += row.train_sr;
    row.cum_train_sr = cum_sr_sum / static_cast<double>(epoch + 1);
    result.metrics.push_back(row);
    result.final_eval = eval;
    if (on_epoch) on_epoch(row);
  }
  result.checkpoint = Checkpoint::from_agent(agent, config.env, config.bonus, root.seed_path());
  return result;
}

}  // namespace sparsebonus

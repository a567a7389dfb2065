#include "sparsebonus/ddpg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "sparsebonus/error.hpp"

namespace sparsebonus {

void AgentParams::validate() const {
  require(gamma > 0.0 && gamma < 1.0, "AgentParams: gamma must lie in (0, 1)");
  require(tau >= 0.0 && tau <= 1.0, "AgentParams: tau must lie in [0, 1]");
  require(actor_lr > 0.0 && critic_lr > 0.0, "AgentParams: learning rates must be positive");
  require(noise_sigma >= 0.0, "AgentParams: noise_sigma must be non-negative");
  require(random_eps >= 0.0 && random_eps <= 1.0, "AgentParams: random_eps must lie in [0, 1]");
  require(!hidden.empty(), "AgentParams: need at least one hidden layer");
  require(norm_clip > 0.0 && norm_eps > 0.0, "AgentParams: normaliser clip/eps must be positive");
}

TargetClip target_clip(const BonusConfig& cfg, double gamma) {
  const RewardRange range = reward_range(cfg);
  return {range.min / (1.0 - gamma), std::max(0.0, range.max) / (1.0 - gamma)};
}

Matrix state_goal(const Matrix& state, const Matrix& goal) { return hconcat(state, goal); }

namespace {

Matrix scaled(const Matrix& m, double factor) {
  Matrix out = m;
  for (double& v : out.flat()) v *= factor;
  return out;
}

bool all_finite(std::span<const double> v) {
  return std::ranges::all_of(v, [](double x) { return std::isfinite(x); });
}

std::vector<int> net_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

}  // namespace

std::vector<double> critic_target(const TrainingBatch& batch, const Mlp& target_actor,
                                  const Mlp& target_critic, const Normalizer& norm,
                                  double gamma, TargetClip clip) {
  const Matrix x2 = norm.normalize(state_goal(batch.next_obs_state, batch.next_goal));
  const Matrix a2 = target_actor.forward(x2);
  const Matrix q2 = target_critic.forward(hconcat(x2, a2));
  std::vector<double> y(batch.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double raw = batch.reward[i] + gamma * (1.0 - batch.done[i]) * q2(i, 0);
    y[i] = std::clamp(raw, clip.lo, clip.hi);
  }
  return y;
}

DdpgAgent::DdpgAgent(const EnvSpec& spec, AgentParams params, const BonusConfig& bonus,
                     Rng& init_rng)
    : spec_(spec), params_(std::move(params)) {
  params_.validate();
  clip_ = target_clip(bonus, params_.gamma);
  const int in = spec_.state_dim + spec_.goal_dim;
  actor_ = Mlp(net_sizes(in, params_.hidden, spec_.action_dim), OutputActivation::Tanh);
  critic_ = Mlp(net_sizes(in + spec_.action_dim, params_.hidden, 1), OutputActivation::Identity);
  Rng actor_rng = init_rng.derive(1);
  Rng critic_rng = init_rng.derive(2);
  actor_.init_glorot(actor_rng);
  critic_.init_glorot(critic_rng);
  target_actor_ = actor_;
  target_critic_ = critic_;
  actor_opt_ = Adam(actor_.param_count(), params_.actor_lr);
  critic_opt_ = Adam(critic_.param_count(), params_.critic_lr);
  norm_ = Normalizer(static_cast<std::size_t>(in), params_.norm_clip, params_.norm_eps);
}

void DdpgAgent::load_targets(const Mlp& actor, const Mlp& critic) {
  require(actor.layer_sizes() == actor_.layer_sizes() && critic.layer_sizes() == critic_.layer_sizes(),
          "load_targets: shape mismatch");
  target_actor_ = actor;
  target_critic_ = critic;
}

void DdpgAgent::set_tau(double tau) {
  require(tau >= 0.0 && tau <= 1.0, "set_tau: tau must lie in [0, 1]");
  params_.tau = tau;
}

Vec DdpgAgent::act(const Observation& obs, bool explore, Rng& rng) const {
  const auto in = static_cast<std::size_t>(spec_.state_dim + spec_.goal_dim);
  require(obs.state.size() + obs.desired_goal.size() == in, "act: observation size mismatch");
  Matrix x(1, in);
  std::ranges::copy(obs.state, x.row(0).begin());
  std::ranges::copy(obs.desired_goal,
                    x.row(0).begin() + static_cast<std::ptrdiff_t>(obs.state.size()));
  const Matrix a = actor_.forward(norm_.normalize(x));

  const double bound = spec_.action_bound;
  Vec u(a.cols());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = a(0, j) * bound;
  if (explore) {
    for (double& v : u) v = std::clamp(v + params_.noise_sigma * bound * rng.next_normal(), -bound, bound);
    if (rng.next_uniform() < params_.random_eps)
      for (double& v : u) v = bound * (2.0 * rng.next_uniform() - 1.0);
  }
  for (double& v : u) v = std::clamp(v, -bound, bound);
  return u;
}

std::vector<double> DdpgAgent::critic_targets(const TrainingBatch& batch) const {
  return critic_target(batch, target_actor_, target_critic_, norm_, params_.gamma, clip_);
}

void DdpgAgent::update_normalizer(const std::vector<Observation>& observations) {
  if (observations.empty()) return;
  Matrix rows(observations.size(), norm_.dim());
  for (std::size_t r = 0; r < observations.size(); ++r) {
    auto dst = rows.row(r);
    std::ranges::copy(observations[r].state, dst.begin());
    std::ranges::copy(observations[r].desired_goal,
                      dst.begin() + static_cast<std::ptrdiff_t>(observations[r].state.size()));
  }
  norm_.update(rows);
}

Losses DdpgAgent::train_batch(const TrainingBatch& batch) {
  const std::size_t n = batch.size();
  require(n > 0, "train_batch: empty batch");
  require(batch.obs_state.cols() == static_cast<std::size_t>(spec_.state_dim) &&
              batch.goal.cols() == static_cast<std::size_t>(spec_.goal_dim) &&
              batch.action.cols() == static_cast<std::size_t>(spec_.action_dim),
          "train_batch: batch does not match the environment");
  const auto adim = static_cast<std::size_t>(spec_.action_dim);
  const double inv_n = 1.0 / static_cast<double>(n);

  const std::vector<double> y = critic_targets(batch);
  const Matrix x = norm_.normalize(state_goal(batch.obs_state, batch.goal));

  // Critic: mean squared Bellman error.
  Losses losses;
  {
    Mlp::Tape tape;
    const Matrix q = critic_.forward(hconcat(x, scaled(batch.action, 1.0 / spec_.action_bound)), tape);
    Matrix dq(n, 1);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double err = q(i, 0) - y[i];
      loss += err * err;
      dq(i, 0) = 2.0 * err * inv_n;
    }
    losses.critic = loss * inv_n;
    if (!std::isfinite(losses.critic)) throw TrainingDiverged("critic loss is not finite");
    const auto grads = critic_.backward(tape, dq);
    critic_opt_.step(critic_.params(), grads.params);
  }

  // Actor: maximise Q(s||g, pi(s||g)) with an L2 penalty on the tanh output.
  {
    Mlp::Tape actor_tape;
    const Matrix a = actor_.forward(x, actor_tape);
    Mlp::Tape critic_tape;
    const Matrix q = critic_.forward(hconcat(x, a), critic_tape);
    Matrix dq(n, 1, -inv_n);
    const auto through = critic_.backward(critic_tape, dq);

    const double l2_scale = params_.action_l2 * inv_n / static_cast<double>(adim);
    Matrix da(n, adim);
    double loss = 0.0;
    double penalty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      loss -= q(i, 0);
      for (std::size_t j = 0; j < adim; ++j) {
        penalty += a(i, j) * a(i, j);
        da(i, j) = through.input(i, x.cols() + j) + 2.0 * l2_scale * a(i, j);
      }
    }
    losses.actor = loss * inv_n + penalty * l2_scale;
    if (!std::isfinite(losses.actor)) throw TrainingDiverged("actor loss is not finite");
    const auto grads = actor_.backward(actor_tape, da);
    actor_opt_.step(actor_.params(), grads.params);
  }

  polyak_update(target_critic_, critic_, params_.tau);
  polyak_update(target_actor_, actor_, params_.tau);
  if (!all_finite(actor_.params()) || !all_finite(critic_.params()))
    throw TrainingDiverged("network parameters became non-finite");
  return losses;
}

// Checkpoint ----------------------------------------------------------------

namespace {

constexpr std::string_view kMagic = "sparsebonus-checkpoint";
constexpr int kVersion = 1;

std::string hex(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
  return std::string(buf, ptr);
}

double parse_hex(const std::string& token) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v,
                                   std::chars_format::hex);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw ConfigError("checkpoint: bad real '" + token + "'");
  return v;
}

void write_values(std::ostream& out, std::span<const double> values) {
  for (double v : values) out << ' ' << hex(v);
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw ConfigError("checkpoint: unexpected end of input");
    return w;
  }
  void expect(std::string_view w) {
    const auto got = word();
    if (got != w) throw ConfigError("checkpoint: expected '" + std::string(w) + "', got '" + got + "'");
  }
  double real() { return parse_hex(word()); }
  std::uint64_t u64() {
    const auto w = word();
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc{} || ptr != w.data() + w.size())
      throw ConfigError("checkpoint: bad integer '" + w + "'");
    return v;
  }
  std::vector<double> reals(std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = real();
    return v;
  }

 private:
  std::istream& in_;
};

}  // namespace

Checkpoint Checkpoint::from_agent(const DdpgAgent& agent, std::string env,
                                  const BonusConfig& bonus,
                                  std::vector<std::uint64_t> seed_path) {
  Checkpoint c;
  c.env = std::move(env);
  c.bonus = bonus;
  c.seed_path = std::move(seed_path);
  c.params = agent.params();
  auto flat = [](const Mlp& m) { return std::vector<double>(m.params().begin(), m.params().end()); };
  c.actor = flat(agent.actor());
  c.critic = flat(agent.critic());
  c.target_actor = flat(agent.target_actor());
  c.target_critic = flat(agent.target_critic());
  c.normalizer = agent.normalizer();
  return c;
}

DdpgAgent Checkpoint::to_agent() const {
  auto env_ptr = make_environment(env);
  Rng scratch = Rng::seed_root(0);
  DdpgAgent agent(env_ptr->spec(), params, bonus, scratch);
  auto load = [](Mlp& m, const std::vector<double>& values, const char* what) {
    if (values.size() != m.param_count())
      throw ConfigError(std::string("checkpoint: wrong parameter count for ") + what);
    std::ranges::copy(values, m.params().begin());
  };
  load(agent.actor(), actor, "actor");
  load(agent.critic(), critic, "critic");
  Mlp ta = agent.actor();
  Mlp tc = agent.critic();
  load(ta, target_actor, "target_actor");
  load(tc, target_critic, "target_critic");
  agent.load_targets(ta, tc);
  if (normalizer.dim() != agent.normalizer().dim())
    throw ConfigError("checkpoint: normaliser dimension mismatch");
  agent.normalizer() = normalizer;
  return agent;
}

void Checkpoint::write(std::ostream& out) const {
  out << kMagic << ' ' << kVersion << '\n';
  out << "env " << env << '\n';
  out << "bonus " << bonus.label() << '\n';
  out << "seed_path " << seed_path.size();
  for (auto s : seed_path) out << ' ' << s;
  out << '\n';
  out << "agent";
  write_values(out, std::vector<double>{params.gamma, params.tau, params.actor_lr, params.critic_lr,
                                        params.noise_sigma, params.random_eps, params.action_l2,
                                        params.norm_clip, params.norm_eps});
  out << '\n';
  out << "hidden " << params.hidden.size();
  for (int h : params.hidden) out << ' ' << h;
  out << '\n';
  auto net = [&](const char* name, const std::vector<double>& values) {
    out << "net " << name << ' ' << values.size();
    write_values(out, values);
    out << '\n';
  };
  net("actor", actor);
  net("critic", critic);
  net("target_actor", target_actor);
  net("target_critic", target_critic);
  out << "normalizer " << normalizer.dim() << ' ' << hex(normalizer.count()) << ' '
      << hex(normalizer.clip()) << ' ' << hex(normalizer.eps());
  write_values(out, normalizer.mean());
  write_values(out, normalizer.m2());
  out << "\nend\n";
}

Checkpoint Checkpoint::read(std::istream& in) {
  Reader r(in);
  r.expect(kMagic);
  if (r.u64() != kVersion) throw ConfigError("checkpoint: unsupported version");
  Checkpoint c;
  r.expect("env");
  c.env = r.word();
  r.expect("bonus");
  c.bonus = BonusConfig::parse(r.word());
  r.expect("seed_path");
  c.seed_path.resize(r.u64());
  for (auto& s : c.seed_path) s = r.u64();
  r.expect("agent");
  c.params.gamma = r.real();
  c.params.tau = r.real();
  c.params.actor_lr = r.real();
  c.params.critic_lr = r.real();
  c.params.noise_sigma = r.real();
  c.params.random_eps = r.real();
  c.params.action_l2 = r.real();
  c.params.norm_clip = r.real();
  c.params.norm_eps = r.real();
  r.expect("hidden");
  c.params.hidden.resize(r.u64());
  for (int& h : c.params.hidden) h = static_cast<int>(r.u64());
  auto net = [&](const char* name) {
    r.expect("net");
    r.expect(name);
    return r.reals(r.u64());
  };
  c.actor = net("actor");
  c.critic = net("critic");
  c.target_actor = net("target_actor");
  c.target_critic = net("target_critic");
  r.expect("normalizer");
  const auto dim = r.u64();
  const double count = r.real();
  const double clip = r.real();
  const double eps = r.real();
  auto mean = r.reals(dim);
  auto m2 = r.reals(dim);
  c.normalizer = Normalizer(dim, clip, eps);
  c.normalizer.restore(count, std::move(mean), std::move(m2));
  r.expect("end");
  return c;
}

}  // namespace sparsebonus

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "sparsebonus/error.hpp"
#include "sparsebonus/experiment.hpp"

namespace sparsebonus {

using nlohmann::json;

void ExperimentConfig::validate() const {
  make_environment(env);
  const auto& s = schedule;
  if (s.epochs <= 0 || s.cycles <= 0 || s.episodes_per_cycle <= 0)
    throw ConfigError("schedule epochs, cycles and episodes_per_cycle must be positive");
  if (s.optimizer_steps_per_cycle < 0)
    throw ConfigError("schedule.optimizer_steps_per_cycle must be non-negative");
  if (s.test_episodes <= 0) throw ConfigError("schedule.test_episodes must be positive");
  if (test_seeds.empty()) throw ConfigError("test_seeds must not be empty");
  if (std::ranges::find(test_seeds, train_seed) != test_seeds.end())
    throw ConfigError("test_seeds must not contain the train_seed");
  if (!(bonus.p >= 0.0 && bonus.p <= 1.0)) throw ConfigError("bonus probability outside [0, 1]");
  if (!(her.relabel_ratio >= 0.0 && her.relabel_ratio <= 1.0))
    throw ConfigError("her.relabel_ratio outside [0, 1]");
  if (her.capacity == 0 || her.batch_size == 0)
    throw ConfigError("her.capacity and her.batch_size must be positive");
  try {
    agent.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
}

std::string ExperimentConfig::stem() const {
  std::ostringstream out;
  out << std::setw(3) << std::setfill('0') << id << '_';
  const double pct = bonus.percent();
  if (std::abs(pct - std::round(pct)) < 1e-9) out << std::llround(pct);
  else out << pct;
  out << '_' << bonus.b << '_' << stage_label(bonus.stage);
  return out.str();
}

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  ExperimentConfig c;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    read_opt(j, "id", c.id);
    read_opt(j, "env", c.env);
    if (j.contains("bonus")) c.bonus = BonusConfig::parse(j.at("bonus").get<std::string>());
    read_opt(j, "train_seed", c.train_seed);
    read_opt(j, "test_seeds", c.test_seeds);
    if (j.contains("schedule")) {
      const auto& s = j.at("schedule");
      read_opt(s, "epochs", c.schedule.epochs);
      read_opt(s, "cycles", c.schedule.cycles);
      read_opt(s, "episodes_per_cycle", c.schedule.episodes_per_cycle);
      read_opt(s, "optimizer_steps_per_cycle", c.schedule.optimizer_steps_per_cycle);
      read_opt(s, "test_episodes", c.schedule.test_episodes);
    }
    if (j.contains("agent")) {
      const auto& a = j.at("agent");
      read_opt(a, "gamma", c.agent.gamma);
      read_opt(a, "tau", c.agent.tau);
      read_opt(a, "actor_lr", c.agent.actor_lr);
      read_opt(a, "critic_lr", c.agent.critic_lr);
      read_opt(a, "noise_sigma", c.agent.noise_sigma);
      read_opt(a, "random_eps", c.agent.random_eps);
      read_opt(a, "action_l2", c.agent.action_l2);
      read_opt(a, "hidden", c.agent.hidden);
      read_opt(a, "norm_clip", c.agent.norm_clip);
      read_opt(a, "norm_eps", c.agent.norm_eps);
    }
    if (j.contains("her")) {
      const auto& h = j.at("her");
      read_opt(h, "relabel_ratio", c.her.relabel_ratio);
      read_opt(h, "capacity", c.her.capacity);
      read_opt(h, "batch_size", c.her.batch_size);
      if (h.contains("reward_mode")) {
        const auto mode = h.at("reward_mode").get<std::string>();
        if (mode == "recompute") c.her.reward_mode = HerRewardMode::Recompute;
        else if (mode == "fixed_zero") c.her.reward_mode = HerRewardMode::FixedZero;
        else throw ConfigError("config: her.reward_mode must be recompute or fixed_zero");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["id"] = id;
  j["env"] = env;
  j["bonus"] = bonus.label();
  j["train_seed"] = train_seed;
  j["test_seeds"] = test_seeds;
  j["schedule"] = {{"epochs", schedule.epochs},
                   {"cycles", schedule.cycles},
                   {"episodes_per_cycle", schedule.episodes_per_cycle},
                   {"optimizer_steps_per_cycle", schedule.optimizer_steps_per_cycle},
                   {"test_episodes", schedule.test_episodes}};
  j["agent"] = {{"gamma", agent.gamma},         {"tau", agent.tau},
                {"actor_lr", agent.actor_lr},   {"critic_lr", agent.critic_lr},
                {"noise_sigma", agent.noise_sigma}, {"random_eps", agent.random_eps},
                {"action_l2", agent.action_l2}, {"hidden", agent.hidden},
                {"norm_clip", agent.norm_clip}, {"norm_eps", agent.norm_eps}};
  j["her"] = {{"relabel_ratio", her.relabel_ratio},
              {"capacity", her.capacity},
              {"batch_size", her.batch_size},
              {"reward_mode", her.reward_mode == HerRewardMode::Recompute ? "recompute" : "fixed_zero"}};
  return j.dump(2) + "\n";
}

}  // namespace sparsebonus

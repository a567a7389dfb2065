#include "sparsebonus/reward_shaping.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "sparsebonus/error.hpp"

namespace sparsebonus {

std::string_view stage_label(Stage s) {
  switch (s) {
    case Stage::NotGoal: return "NG";
    case Stage::Goal: return "G";
    case Stage::Both: return "B";
    case Stage::Reference: return "REF";
  }
  return "?";
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

BonusConfig BonusConfig::parse(std::string_view text) {
  const std::string original(text);
  text = trim(text);
  if (text == "REF") return reference();

  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos)
    throw ConfigError("bonus '" + original + "': expected P:B:N");

  auto p_text = trim(text.substr(0, c1));
  auto b_text = trim(text.substr(c1 + 1, c2 - c1 - 1));
  auto n_text = trim(text.substr(c2 + 1));

  double percent = 0.0;
  {
    auto [ptr, ec] = std::from_chars(p_text.data(), p_text.data() + p_text.size(), percent);
    if (ec != std::errc{} || ptr != p_text.data() + p_text.size() || p_text.empty())
      throw ConfigError("bonus '" + original + "': bad probability");
  }
  if (!(percent >= 0.0 && percent <= 100.0))
    throw ConfigError("bonus '" + original + "': probability outside [0, 100]");

  if (!b_text.empty() && b_text.front() == '+') b_text.remove_prefix(1);
  int bonus = 0;
  {
    auto [ptr, ec] = std::from_chars(b_text.data(), b_text.data() + b_text.size(), bonus);
    if (ec != std::errc{} || ptr != b_text.data() + b_text.size() || b_text.empty())
      throw ConfigError("bonus '" + original + "': bonus must be an integer");
  }

  Stage stage;
  if (n_text == "NG") stage = Stage::NotGoal;
  else if (n_text == "G") stage = Stage::Goal;
  else if (n_text == "B" || n_text == "BOTH") stage = Stage::Both;
  else if (n_text == "REF") stage = Stage::Reference;
  else throw ConfigError("bonus '" + original + "': stage must be NG, G, B or REF");

  if (stage == Stage::Reference) return reference();
  return BonusConfig{percent / 100.0, bonus, stage};
}

std::string BonusConfig::label() const {
  if (stage == Stage::Reference) return "100:0:REF";
  std::ostringstream out;
  const double pct = percent();
  if (std::abs(pct - std::round(pct)) < 1e-9) out << static_cast<long long>(std::llround(pct));
  else out << pct;
  out << ':' << (b > 0 ? "+" : "") << b << ':' << stage_label(stage);
  return out.str();
}

bool bonus_eligible(const BonusConfig& cfg, bool achieved) {
  switch (cfg.stage) {
    case Stage::Both: return true;
    case Stage::NotGoal: return !achieved;
    case Stage::Goal: return achieved;
    case Stage::Reference: return false;
  }
  return false;
}

ShapedReward apply_bonus(double base, bool achieved, const BonusConfig& cfg, Rng& rng) {
  require(base == 0.0 || base == -1.0, "apply_bonus: base reward must be -1 or 0");
  require((base == 0.0) == achieved, "apply_bonus: base reward inconsistent with achieved");
  ShapedReward r{base, base, 0.0};
  if (!bonus_eligible(cfg, achieved)) return r;
  if (rng.next_uniform() >= cfg.p) {
    r.bonus_applied = cfg.b;
    r.total = base + cfg.b;
  }
  return r;
}

double expected_step_reward(double base, bool eligible, const BonusConfig& cfg) {
  if (!eligible || cfg.stage == Stage::Reference) return base;
  return base + cfg.b * (1.0 - cfg.p);
}

double expected_training_reward(const BonusConfig& cfg, double her_ratio, bool achieved) {
  require(her_ratio >= 0.0 && her_ratio <= 1.0, "expected_training_reward: her_ratio outside [0, 1]");
  const bool eligible = bonus_eligible(cfg, achieved);
  if (!achieved) return expected_step_reward(-1.0, eligible, cfg);
  // (1 - h)(r + b - pb) + h r with r = 0.
  const double r = 0.0;
  const double shaped = eligible ? r + cfg.b - cfg.p * cfg.b : r;
  return (1.0 - her_ratio) * shaped + her_ratio * r;
}

double monte_carlo_training_reward(const BonusConfig& cfg, double her_ratio, bool achieved,
                                   long long samples, Rng& rng) {
  require(samples > 0, "monte_carlo_training_reward: samples must be positive");
  const double base = achieved ? 0.0 : -1.0;
  double sum = 0.0;
  for (long long i = 0; i < samples; ++i) {
    if (achieved && rng.next_uniform() < her_ratio) continue;  // relabeled, reward 0
    sum += apply_bonus(base, achieved, cfg, rng).total;
  }
  return sum / static_cast<double>(samples);
}

double expected_episode_return(const BonusConfig& cfg, int horizon, int steps_to_goal) {
  require(steps_to_goal >= 0 && steps_to_goal <= horizon,
          "expected_episode_return: steps_to_goal outside [0, horizon]");
  const double ng = expected_step_reward(-1.0, bonus_eligible(cfg, false), cfg);
  const double g = expected_step_reward(0.0, bonus_eligible(cfg, true), cfg);
  return steps_to_goal * ng + (horizon - steps_to_goal) * g;
}

RewardRange reward_range(const BonusConfig& cfg) {
  RewardRange range{-1.0, 0.0};
  if (cfg.p >= 1.0) return range;
  if (bonus_eligible(cfg, false)) {
    range.min = std::min(range.min, -1.0 + cfg.b);
    range.max = std::max(range.max, -1.0 + cfg.b);
  }
  if (bonus_eligible(cfg, true)) {
    range.min = std::min(range.min, static_cast<double>(cfg.b));
    range.max = std::max(range.max, static_cast<double>(cfg.b));
  }
  return range;
}

}  // namespace sparsebonus

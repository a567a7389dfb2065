#include "sparsebonus/verify.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstdio>

#include "sparsebonus/error.hpp"

namespace sparsebonus {

bool VerificationReport::passed() const {
  return std::ranges::all_of(checks, [](const StatCheck& c) { return c.passed; });
}

std::string VerificationReport::format() const {
  std::string out;
  char buf[512];
  for (const auto& c : checks) {
    if (c.rule.empty())
      std::snprintf(buf, sizeof buf, "[%s] %-40s measured=%.6f expected=%.6f tol=%.6f\n",
                    c.passed ? "PASS" : "FAIL", c.name.c_str(), c.measured, c.expected, c.tolerance);
    else
      std::snprintf(buf, sizeof buf, "[%s] %-40s measured=%.6f (%s)\n", c.passed ? "PASS" : "FAIL",
                    c.name.c_str(), c.measured, c.rule.c_str());
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%zu checks, %s\n", checks.size(), passed() ? "all passed" : "FAILURES");
  out += buf;
  return out;
}

const std::vector<double>& grid_probabilities() {
  static const std::vector<double> p{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  return p;
}

const std::vector<int>& grid_bonuses() {
  static const std::vector<int> b{-15, -10, -5, -1, 1, 10};
  return b;
}

double bonus_frequency(const BonusConfig& cfg, long long n, Rng& rng) {
  require(cfg.stage == Stage::Both, "bonus_frequency: use a B-stage config so every call is eligible");
  long long hits = 0;
  for (long long i = 0; i < n; ++i) {
    const double base = (i & 1) ? 0.0 : -1.0;
    hits += apply_bonus(base, base == 0.0, cfg, rng).bonus_applied != 0.0 ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

double shaped_mean(const BonusConfig& cfg, double base, long long n, Rng& rng) {
  double sum = 0.0;
  for (long long i = 0; i < n; ++i) sum += apply_bonus(base, base == 0.0, cfg, rng).total;
  return sum / static_cast<double>(n);
}

double chi_square_uniform_pvalue(const std::vector<long long>& counts) {
  require(counts.size() >= 2, "chi_square_uniform_pvalue: need at least two bins");
  long long total = 0;
  for (auto c : counts) total += c;
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0.0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  const boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

double ks_uniform_statistic(std::vector<double> samples) {
  std::ranges::sort(samples);
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = samples[i];
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - x, x - static_cast<double>(i) / n});
  }
  return d;
}

std::vector<Transition> synthetic_episode(int horizon, const BonusConfig& cfg, Rng& rng) {
  std::vector<Transition> ep;
  Observation obs{{0.0, 0.0}, {0.0, 0.0}, {5.0, 5.0}};
  for (int t = 0; t < horizon; ++t) {
    Observation next = obs;
    // Step of 0.04 or 0: distances between achieved goals straddle the 0.05 tolerance.
    const double dx = rng.next_uniform() < 0.5 ? 0.04 : 0.0;
    next.state[0] += dx;
    next.achieved_goal[0] += dx;
    Transition tr;
    tr.obs = obs;
    tr.action = {dx, 0.0};
    tr.base_reward = -1.0;
    tr.bonus_applied = apply_bonus(-1.0, false, cfg, rng).bonus_applied;
    tr.next_obs = next;
    tr.achieved_next = false;
    tr.t = t;
    ep.push_back(std::move(tr));
    obs = std::move(next);
  }
  return ep;
}

VerificationReport verify_statistics(const VerifyOptions& options) {
  require(options.iterations >= 100'000, "verify_statistics: iterations must be at least 1e5");
  VerificationReport report;
  const Rng root = Rng::seed_root(options.seed);
  const long long n = options.iterations;
  std::uint64_t label = 0;
  char name[128];

  auto add = [&](std::string nm, double measured, double expected, double tol) {
    report.checks.push_back({std::move(nm), measured, expected, tol, std::abs(measured - expected) <= tol, {}});
  };

  // Frequency law over the grid probabilities.
  for (double p : grid_probabilities()) {
    Rng rng = root.derive(++label);
    const double f = bonus_frequency(BonusConfig{p, -1, Stage::Both}, n, rng);
    std::snprintf(name, sizeof name, "frequency p=%.1f", p);
    add(name, f, 1.0 - p, 0.002);
  }

  // Mean law at the NG base reward for every grid bonus.
  for (int b : grid_bonuses()) {
    for (double p : {0.0, 0.3, 0.5, 0.9}) {
      const BonusConfig cfg{p, b, Stage::NotGoal};
      Rng rng = root.derive(++label);
      std::snprintf(name, sizeof name, "mean law b=%d p=%.1f", b, p);
      add(name, shaped_mean(cfg, -1.0, n, rng), expected_step_reward(-1.0, true, cfg),
          0.01 * std::abs(b) + 0.005);
    }
  }

  // Goal-stage mix law: simulated at 0.8, oracle at options.oracle_her_ratio.
  for (int b : {10, 1, -1}) {
    for (double p : {0.0, 0.3, 0.5}) {
      const BonusConfig cfg{p, b, Stage::Goal};
      Rng rng = root.derive(++label);
      std::snprintf(name, sizeof name, "mix law b=%d p=%.1f", b, p);
      add(name, monte_carlo_training_reward(cfg, 0.8, true, n, rng),
          expected_training_reward(cfg, options.oracle_her_ratio, true), 0.01 * std::abs(b) + 0.005);
    }
  }

  // Relabel ratio and bonus isolation on a never-achieving replay store.
  {
    const int horizon = 60;
    const BonusConfig cfg{0.0, -15, Stage::NotGoal};
    ReplayStore store(horizon, 50);
    Rng ep_rng = root.derive(++label);
    for (int e = 0; e < 50; ++e) store.store_episode(synthetic_episode(horizon, cfg, ep_rng));
    Rng rng = root.derive(++label);
    long long relabeled = 0, total = 0, leaked = 0;
    while (total < n) {
      const auto batch = store.sample_batch(4096, 0.8, 0.05, rng);
      for (std::size_t i = 0; i < batch.size() && total < n; ++i, ++total) {
        if (!batch.relabeled[i]) continue;
        ++relabeled;
        if (batch.reward[i] != 0.0 && batch.reward[i] != -1.0) ++leaked;
      }
    }
    add("relabel ratio", static_cast<double>(relabeled) / static_cast<double>(total), 0.8, 0.004);
    add("relabeled rewards outside {-1,0}", static_cast<double>(leaked), 0.0, 0.0);
  }

  // Future-index uniformity for a fixed t.
  {
    const int horizon = 60, t = 17;
    Rng rng = root.derive(++label);
    std::vector<long long> counts(static_cast<std::size_t>(horizon - t), 0);
    for (long long i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(draw_future_index(t, horizon, rng) - t - 1)];
    const double pv = chi_square_uniform_pvalue(counts);
    report.checks.push_back({"relabel index uniformity (chi2 p-value)", pv, 0.0, 0.0, pv > 0.01, "p > 0.01"});
  }

  // Uniform generator sanity.
  {
    Rng rng = root.derive(++label);
    std::vector<double> xs(100'000);
    for (double& x : xs) x = rng.next_uniform();
    const double d = ks_uniform_statistic(std::move(xs));
    report.checks.push_back({"uniform KS statistic (1e5 draws)", d, 0.0, 0.0, d < 0.006, "D < 0.006"});
  }
  return report;
}

}  // namespace sparsebonus

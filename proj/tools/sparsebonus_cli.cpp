#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sparsebonus/error.hpp"
#include "sparsebonus/experiment.hpp"
#include "sparsebonus/report.hpp"
#include "sparsebonus/verify.hpp"

namespace fs = std::filesystem;
using namespace sparsebonus;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitBadConfig = 2;

struct CommonFlags {
  std::string config;
  std::string env;
  std::string out = ".";
  std::vector<std::string> bonus;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int epochs = -1;
};

ExperimentConfig load_config(const CommonFlags& f) {
  ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : ExperimentConfig::from_file(f.config);
  if (!f.env.empty()) c.env = f.env;
  if (!f.bonus.empty()) c.bonus = BonusConfig::parse(f.bonus.front());
  if (f.seed_set) c.train_seed = f.seed;
  if (f.epochs >= 0) c.schedule.epochs = f.epochs;
  c.validate();
  return c;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << s;
}

int cmd_train(const CommonFlags& f) {
  const ExperimentConfig c = load_config(f);
  fs::create_directories(f.out);
  const fs::path csv_path = fs::path(f.out) / "metrics.csv";
  write_text(fs::path(f.out) / "config.json", c.to_json_text());
  std::vector<MetricsRow> rows;
  try {
    auto result = train(c, [&](const MetricsRow& row) {
      rows.push_back(row);
      write_text(csv_path, metrics_csv(rows));
      std::fprintf(stderr, "epoch %d  train_sr=%.3f  train_return=%.2f  test_sr=%.3f  test_return=%.2f\n",
                   row.epoch, row.train_sr, row.train_return, row.test_sr, row.test_return);
    });
    write_text(csv_path, metrics_csv(result.metrics));
    std::ostringstream ckpt;
    result.checkpoint.write(ckpt);
    write_text(fs::path(f.out) / "checkpoint.ckpt", ckpt.str());
    std::printf("wrote %s\n", csv_path.c_str());
  } catch (const TrainingDiverged& e) {
    write_text(csv_path, metrics_csv(rows));
    std::fprintf(stderr, "training diverged after %zu epochs: %s\n", rows.size(), e.what());
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_eval(const std::string& checkpoint_path, const std::vector<std::uint64_t>& seeds, int episodes) {
  std::ifstream in(checkpoint_path);
  if (!in) throw ConfigError("cannot open checkpoint " + checkpoint_path);
  const Checkpoint ckpt = Checkpoint::read(in);
  const DdpgAgent agent = ckpt.to_agent();
  const auto env = make_environment(ckpt.env);
  const auto result = evaluate(agent, *env, seeds.empty() ? ExperimentConfig{}.test_seeds : seeds, episodes);
  std::printf("env=%s bonus=%s success_rate=%s mean_return=%s\n", ckpt.env.c_str(), ckpt.bonus.label().c_str(),
              format_real(result.success_rate).c_str(), format_real(result.mean_return).c_str());
  for (const auto& s : result.per_seed)
    std::printf("  seed %llu: success_rate=%s mean_return=%s\n", static_cast<unsigned long long>(s.seed),
                format_real(s.success_rate).c_str(), format_real(s.mean_return).c_str());
  return kExitOk;
}

int cmd_grid(const CommonFlags& f, int parallel) {
  CommonFlags base_flags = f;
  base_flags.bonus.clear();
  const ExperimentConfig base = load_config(base_flags);
  std::vector<ExperimentConfig> grid = expand_grid(base);
  if (!f.bonus.empty()) {
    std::vector<ExperimentConfig> subset;
    for (const auto& text : f.bonus) {
      const BonusConfig b = BonusConfig::parse(text);
      const GridCell* cell = find_grid_cell(b);
      if (!cell) throw ConfigError("bonus " + b.label() + " is not a grid configuration");
      subset.push_back(grid[static_cast<std::size_t>(cell->id - 1)]);
    }
    grid = std::move(subset);
  }
  const auto report = run_grid(grid, f.out, parallel);
  std::printf("grid: %d ran, %d skipped, %d failed -> %s\n", report.ran, report.skipped, report.failed,
              f.out.c_str());
  return report.failed == 0 ? kExitOk : kExitFailure;
}

int cmd_report(const std::string& results, const std::string& out) {
  const Summary summary = summarize(results);
  for (const auto& w : summary.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  for (const auto& i : summary.incomplete) std::fprintf(stderr, "incomplete: %s\n", i.c_str());
  if (summary.rows.empty()) std::fprintf(stderr, "warning: no completed configurations\n");
  const auto files = write_report(summary, out.empty() ? results : out);
  std::fputs(summary_markdown(summary.rows).c_str(), stdout);
  for (const auto& p : files) std::fprintf(stderr, "wrote %s\n", p.c_str());
  return kExitOk;
}

int cmd_verify(const VerifyOptions& opts) {
  const auto report = verify_statistics(opts);
  std::fputs(report.format().c_str(), stdout);
  return report.passed() ? kExitOk : kExitFailure;
}

int cmd_expect(const std::string& bonus_text, int horizon, int steps_to_goal, double her_ratio) {
  const BonusConfig cfg = BonusConfig::parse(bonus_text);
  const bool ng = bonus_eligible(cfg, false), g = bonus_eligible(cfg, true);
  std::printf("config %s (p=%s, b=%d, stage=%s)\n", cfg.label().c_str(), format_real(cfg.p).c_str(), cfg.b,
              std::string(stage_label(cfg.stage)).c_str());
  std::printf("expected step reward, goal not achieved: %s\n", format_real(expected_step_reward(-1.0, ng, cfg)).c_str());
  std::printf("expected step reward, goal achieved:     %s\n", format_real(expected_step_reward(0.0, g, cfg)).c_str());
  std::printf("expected training reward NG: %s\n", format_real(expected_training_reward(cfg, her_ratio, false)).c_str());
  std::printf("expected training reward G (her_ratio=%s): %s\n", format_real(her_ratio).c_str(),
              format_real(expected_training_reward(cfg, her_ratio, true)).c_str());
  std::printf("expected episode return (horizon=%d, goal at step %d): %s\n", horizon, steps_to_goal,
              format_real(expected_episode_return(cfg, horizon, steps_to_goal)).c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic sparse-reward bonus laboratory (DDPG + HER)"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto add_common = [&](CLI::App* sub, bool multi_bonus) {
    sub->add_option("--config", flags.config, "Experiment config (JSON)");
    sub->add_option("--env", flags.env, "Environment: point_reach | puck_slide");
    sub->add_option("--out", flags.out, "Output directory");
    auto* bonus = sub->add_option("--bonus", flags.bonus, "Bonus config P:B:N");
    if (!multi_bonus) bonus->expected(1);
    sub->add_option("--seed", flags.seed, "Training seed")->each([&](const std::string&) { flags.seed_set = true; });
    sub->add_option("--epochs", flags.epochs, "Override schedule.epochs");
  };

  auto* train_cmd = app.add_subcommand("train", "Train one configuration");
  add_common(train_cmd, false);

  std::string checkpoint;
  std::vector<std::uint64_t> eval_seeds;
  int eval_episodes = 20;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint without bonuses");
  eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--seed", eval_seeds, "Test seed (repeatable)");
  eval_cmd->add_option("--episodes", eval_episodes, "Episodes per seed");

  int parallel = 1;
  auto* grid_cmd = app.add_subcommand("grid", "Run the experiment grid (or a --bonus subset)");
  add_common(grid_cmd, true);
  grid_cmd->add_option("--parallel", parallel, "Concurrent workers");

  std::string results;
  std::string report_out;
  auto* report_cmd = app.add_subcommand("report", "Summarise a results directory");
  report_cmd->add_option("--results", results, "Results directory written by grid")->required();
  report_cmd->add_option("--out", report_out, "Report directory (default: results directory)");

  VerifyOptions verify_opts;
  auto* verify_cmd = app.add_subcommand("verify", "Monte-Carlo self-checks of the reward and replay laws");
  verify_cmd->add_option("--iterations", verify_opts.iterations, "Draws per check (>= 100000)");
  verify_cmd->add_option("--seed", verify_opts.seed, "Seed");
  verify_cmd->add_option("--oracle-her-ratio", verify_opts.oracle_her_ratio, "Mix ratio assumed by the oracle");

  std::string expect_bonus = "100:0:REF";
  int horizon = 60, steps_to_goal = 30;
  double her_ratio = 0.8;
  auto* expect_cmd = app.add_subcommand("expect", "Analytic expected rewards for a P:B:N config");
  expect_cmd->add_option("--bonus", expect_bonus, "Bonus config P:B:N");
  expect_cmd->add_option("--horizon", horizon, "Episode length");
  expect_cmd->add_option("--steps-to-goal", steps_to_goal, "Steps spent before the goal is achieved");
  expect_cmd->add_option("--her-ratio", her_ratio, "Relabeled fraction of the minibatch");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadConfig;
  }

  try {
    if (*train_cmd) return cmd_train(flags);
    if (*eval_cmd) return cmd_eval(checkpoint, eval_seeds, eval_episodes);
    if (*grid_cmd) return cmd_grid(flags, parallel);
    if (*report_cmd) return cmd_report(results, report_out);
    if (*verify_cmd) return cmd_verify(verify_opts);
    if (*expect_cmd) return cmd_expect(expect_bonus, horizon, steps_to_goal, her_ratio);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitBadConfig;
  } catch (const ContractViolation& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitOk;
}

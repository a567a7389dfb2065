#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sparsebonus/ddpg.hpp"
#include "sparsebonus/envs.hpp"
#include "sparsebonus/her_replay.hpp"
#include "sparsebonus/reward_shaping.hpp"

namespace sparsebonus {

struct Schedule {
  int epochs = 50;
  int cycles = 10;
  int episodes_per_cycle = 4;
  int optimizer_steps_per_cycle = 8;
  int test_episodes = 20;  // per test seed, per evaluation
};

struct HerSettings {
  double relabel_ratio = 0.8;
  std::size_t capacity = 1000;
  std::size_t batch_size = 256;
  HerRewardMode reward_mode = HerRewardMode::Recompute;
};

struct ExperimentConfig {
  int id = 0;  // grid row id; 0 for ad-hoc runs
  std::string env = "point_reach";
  BonusConfig bonus;
  std::uint64_t train_seed = 1;
  std::vector<std::uint64_t> test_seeds = {1001, 1002, 1003, 1004, 1005};
  Schedule schedule;
  AgentParams agent;
  HerSettings her;

  /// Throws ConfigError on any inconsistency.
  void validate() const;
  /// File stem, e.g. "043_100_0_REF" or "000_50_-5_NG".
  std::string stem() const;

  /// JSON object mirroring the fields above; bonus is a "P:B:N" string.
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::filesystem::path& path);
  std::string to_json_text() const;
};

struct MetricsRow {
  int epoch = 0;
  double train_sr = 0.0;
  double train_return = 0.0;
  double test_sr = 0.0;
  double test_return = 0.0;
  double cum_train_sr = 0.0;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

inline constexpr std::string_view kMetricsHeader =
    "epoch,train_sr,train_return,test_sr,test_return,cum_train_sr";

std::string format_real(double v);  // shortest round-trip decimal
std::string metrics_csv(const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> parse_metrics_csv(const std::string& text);

enum class RolloutMode { Train, Evaluate };

struct EpisodeOutcome {
  std::vector<Transition> transitions;
  std::vector<Observation> observations;  // horizon + 1
  bool success = false;                   // achieved at the final step
  double shaped_return = 0.0;
};

/// Caller-owned random streams for one episode.
struct EpisodeStreams {
  Rng env;
  Rng policy;
  Rng bonus;
};

/// Rolls a full horizon. Evaluate mode requires the REF config and no
/// exploration; bonuses are then never drawn.
EpisodeOutcome run_episode(Environment& env, const Policy& policy, const BonusConfig& bonus,
                           bool explore, RolloutMode mode, EpisodeStreams& streams);

struct SeedResult {
  std::uint64_t seed = 0;
  double success_rate = 0.0;
  double mean_return = 0.0;
};

struct EvalResult {
  double success_rate = 0.0;
  double mean_return = 0.0;
  std::vector<SeedResult> per_seed;
};

/// Deterministic policy, no bonus. Episode e under seed s resets from
/// Rng::seed_root(s).derive(e), so every evaluation sees the same episodes.
EvalResult evaluate(const Policy& policy, const Environment& prototype,
                    const std::vector<std::uint64_t>& test_seeds, int episodes_per_seed);

struct TrainResult {
  std::vector<MetricsRow> metrics;
  Checkpoint checkpoint;
  EvalResult final_eval;
};

/// Full train/evaluate loop. `on_epoch` sees each row as soon as it exists, so
/// a caller can flush partial metrics before a TrainingDiverged propagates.
TrainResult train(const ExperimentConfig& config,
                  const std::function<void(const MetricsRow&)>& on_epoch = {});

/// Cell of the experiment grid: row id and its bonus config.
struct GridCell {
  int id = 0;
  BonusConfig bonus;
};

/// The 75 configurations in published row order (id 43 is the reference).
const std::vector<GridCell>& paper_grid();

/// Copies `base` once per grid cell, setting id and bonus.
std::vector<ExperimentConfig> expand_grid(const ExperimentConfig& base);

/// Finds the grid row for a label such as "0:-1:B" or "REF".
const GridCell* find_grid_cell(const BonusConfig& bonus);

struct ManifestEntry {
  int id = 0;
  std::string label;
  std::string status;  // "done" or "failed"
  std::string checksum;
  std::string file;
  std::string note;
};

inline constexpr std::string_view kManifestName = "manifest.tsv";

std::string fnv1a_hex(std::string_view bytes);
std::map<int, ManifestEntry> read_manifest(const std::filesystem::path& dir);
void write_manifest(const std::filesystem::path& dir, const std::map<int, ManifestEntry>& entries);

struct GridReport {
  int ran = 0;
  int skipped = 0;
  int failed = 0;
};

/// Runs every config not already recorded as done (with a matching CSV
/// checksum). Writes <stem>.csv, <stem>.seeds.csv, <stem>.ckpt and
/// manifest.tsv into `out`.
GridReport run_grid(const std::vector<ExperimentConfig>& grid, const std::filesystem::path& out,
                    int parallelism);

}  // namespace sparsebonus

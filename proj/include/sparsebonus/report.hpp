#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sparsebonus/reward_shaping.hpp"

namespace sparsebonus {

/// One line of the results table.
struct SummaryRow {
  int id = 0;
  double probability = 100.0;  // percent
  int bonus = 0;
  Stage stage = Stage::Reference;
  double test_reward = 0.0;
  double test_success_rate = 0.0;
  double train_reward = 0.0;
  double train_success_rate = 0.0;
  // Final-evaluation returns per test seed, when <stem>.seeds.csv exists.
  std::vector<double> seed_test_returns;

  BonusConfig config() const;
  std::string series_key() const;  // "B:N", e.g. "-1:B"
};

struct Summary {
  std::vector<SummaryRow> rows;       // id order
  std::vector<std::string> incomplete;  // manifest entries without a usable CSV
  std::vector<std::string> warnings;
};

/// Test columns come from the final epoch, train columns are means over all
/// epochs. Reads only files already on disk.
Summary summarize(const std::filesystem::path& results_dir);

std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string summary_markdown(const std::vector<SummaryRow>& rows);

enum class PlotKind { ScatterTest, SeriesVsProbability, ScatterTrain, BarSummary };

struct PlotSpec {
  PlotKind kind = PlotKind::ScatterTest;
  std::string title;
  std::string x_label;
  std::string y_label;
  bool highlight_reference = true;
  // SeriesVsProbability only: which (B, N) series to draw.
  int series_bonus = 0;
  Stage series_stage = Stage::Both;
};

PlotSpec default_plot_spec(PlotKind kind);

/// Self-contained SVG. No timestamps or other run-dependent content.
std::string render_plot(const PlotSpec& spec, const std::vector<SummaryRow>& rows);

/// Writes summary.csv, summary.md and every figure into `out_dir`.
/// Returns the list of files written.
std::vector<std::filesystem::path> write_report(const Summary& summary,
                                                const std::filesystem::path& out_dir);

}  // namespace sparsebonus

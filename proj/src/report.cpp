#include "sparsebonus/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sparsebonus/error.hpp"
#include "sparsebonus/experiment.hpp"

namespace sparsebonus {

BonusConfig SummaryRow::config() const {
  if (stage == Stage::Reference) return BonusConfig::reference();
  return BonusConfig{probability / 100.0, bonus, stage};
}

std::string SummaryRow::series_key() const {
  if (stage == Stage::Reference) return "REF";
  return (bonus > 0 ? "+" : "") + std::to_string(bonus) + ":" + std::string(stage_label(stage));
}

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s == "-0" || s.rfind("-0.", 0) == 0) {
    // Avoid "-0.000" for tiny negatives.
    bool all_zero = std::all_of(s.begin() + 1, s.end(), [](char c) { return c == '0' || c == '.'; });
    if (all_zero) s.erase(0, 1);
  }
  return s;
}

std::vector<double> read_seed_returns(const std::filesystem::path& p) {
  std::vector<double> out;
  std::ifstream in(p);
  std::string line;
  if (!std::getline(in, line)) return out;
  while (std::getline(in, line)) {
    const auto last = line.rfind(',');
    if (last == std::string::npos) continue;
    out.push_back(std::stod(line.substr(last + 1)));
  }
  return out;
}

}  // namespace

Summary summarize(const std::filesystem::path& results_dir) {
  Summary summary;
  if (!std::filesystem::exists(results_dir / kManifestName)) {
    summary.warnings.push_back("no manifest in " + results_dir.string());
    return summary;
  }
  for (const auto& [id, entry] : read_manifest(results_dir)) {
    const auto csv_path = results_dir / entry.file;
    if (entry.status != "done" || !std::filesystem::exists(csv_path)) {
      summary.incomplete.push_back(std::to_string(id) + " " + entry.label + " (" + entry.status + ")");
      continue;
    }
    const std::string csv = slurp(csv_path);
    if (fnv1a_hex(csv) != entry.checksum) {
      summary.incomplete.push_back(std::to_string(id) + " " + entry.label + " (checksum mismatch)");
      continue;
    }
    const auto metrics = parse_metrics_csv(csv);
    if (metrics.empty()) {
      summary.incomplete.push_back(std::to_string(id) + " " + entry.label + " (no epochs)");
      continue;
    }
    const BonusConfig cfg = BonusConfig::parse(entry.label);
    SummaryRow row;
    row.id = id;
    row.probability = cfg.percent();
    row.bonus = cfg.b;
    row.stage = cfg.stage;
    row.test_reward = metrics.back().test_return;
    row.test_success_rate = metrics.back().test_sr;
    double tr = 0.0, ts = 0.0;
    for (const auto& m : metrics) {
      tr += m.train_return;
      ts += m.train_sr;
    }
    row.train_reward = tr / static_cast<double>(metrics.size());
    row.train_success_rate = ts / static_cast<double>(metrics.size());
    auto seeds_path = csv_path;
    seeds_path.replace_extension(".seeds.csv");
    if (std::filesystem::exists(seeds_path)) row.seed_test_returns = read_seed_returns(seeds_path);
    summary.rows.push_back(std::move(row));
  }
  return summary;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out =
      "id,probability,bonus,stage,test_reward,test_success_rate,train_reward,train_success_rate\n";
  for (const auto& r : rows) {
    out += std::to_string(r.id) + ',' + format_real(r.probability) + ',' + std::to_string(r.bonus) +
           ',' + std::string(stage_label(r.stage)) + ',' + format_real(r.test_reward) + ',' +
           format_real(r.test_success_rate) + ',' + format_real(r.train_reward) + ',' +
           format_real(r.train_success_rate) + '\n';
  }
  return out;
}

std::string summary_markdown(const std::vector<SummaryRow>& rows) {
  std::string out =
      "| Id | Probability | Bonus | Stage | Test reward | Test Success Rate | Train reward | Train "
      "Success Rate |\n|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    out += "| " + std::to_string(r.id) + " | " + format_real(r.probability) + " | " +
           std::to_string(r.bonus) + " | " + std::string(stage_label(r.stage)) + " | " +
           fixed(r.test_reward, 3) + " | " + fixed(r.test_success_rate, 3) + " | " +
           fixed(r.train_reward, 3) + " | " + fixed(r.train_success_rate, 3) + " |\n";
  }
  return out;
}

// Plotting ------------------------------------------------------------------

PlotSpec default_plot_spec(PlotKind kind) {
  PlotSpec s;
  s.kind = kind;
  switch (kind) {
    case PlotKind::ScatterTest:
      s.title = "Test reward vs test success rate";
      s.x_label = "Test reward";
      s.y_label = "Test success rate";
      break;
    case PlotKind::ScatterTrain:
      s.title = "Train reward vs train success rate";
      s.x_label = "Train reward";
      s.y_label = "Train success rate";
      break;
    case PlotKind::SeriesVsProbability:
      s.title = "Test success rate vs probability";
      s.x_label = "Probability P (%)";
      s.y_label = "Test success rate";
      break;
    case PlotKind::BarSummary:
      s.title = "Test reward per configuration";
      s.x_label = "Configuration (P:B:N)";
      s.y_label = "Test reward (mean \xC2\xB1 std over test seeds)";
      break;
  }
  return s;
}

namespace {

constexpr double kWidth = 760, kHeight = 500;
constexpr double kLeft = 80, kRight = 170, kTop = 50, kBottom = 70;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b",
                                "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79",
                                "#637939", "#8c6d31"};
constexpr const char* kReferenceColor = "#d62728";

std::string esc(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) { return fixed(v, 2); }

struct Range {
  double lo, hi;
};

double nice_step(double span) {
  if (span <= 0) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  const double nice = f < 1.5 ? 1 : f < 3 ? 2 : f < 7 ? 5 : 10;
  return nice * mag;
}

Range padded(double lo, double hi) {
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double step = nice_step(hi - lo);
  return {std::floor(lo / step) * step, std::ceil(hi / step) * step};
}

class Canvas {
 public:
  Canvas(Range x, Range y) : x_(x), y_(y) {}

  double px(double x) const { return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom); }

  std::string& out() { return svg_; }
  Range x() const { return x_; }
  Range y() const { return y_; }

  void axes(const PlotSpec& spec, bool numeric_x) {
    svg_ += "<rect class=\"frame\" x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" +
            num(kWidth - kLeft - kRight) + "\" height=\"" + num(kHeight - kTop - kBottom) +
            "\" fill=\"none\" stroke=\"#333\"/>\n";
    if (numeric_x) {
      const double sx = nice_step(x_.hi - x_.lo);
      for (double t = x_.lo; t <= x_.hi + sx * 1e-9; t += sx) {
        svg_ += "<line class=\"tick\" x1=\"" + num(px(t)) + "\" y1=\"" + num(kHeight - kBottom) +
                "\" x2=\"" + num(px(t)) + "\" y2=\"" + num(kHeight - kBottom + 5) + "\" stroke=\"#333\"/>\n";
        svg_ += "<text class=\"tick-label\" x=\"" + num(px(t)) + "\" y=\"" + num(kHeight - kBottom + 20) +
                "\" text-anchor=\"middle\" font-size=\"11\">" + tick_text(t, sx) + "</text>\n";
      }
    }
    const double sy = nice_step(y_.hi - y_.lo);
    for (double t = y_.lo; t <= y_.hi + sy * 1e-9; t += sy) {
      svg_ += "<line class=\"tick\" x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(py(t)) + "\" x2=\"" +
              num(kLeft) + "\" y2=\"" + num(py(t)) + "\" stroke=\"#333\"/>\n";
      svg_ += "<text class=\"tick-label\" x=\"" + num(kLeft - 8) + "\" y=\"" + num(py(t) + 4) +
              "\" text-anchor=\"end\" font-size=\"11\">" + tick_text(t, sy) + "</text>\n";
    }
    svg_ += "<text class=\"title\" x=\"" + num(kWidth / 2) + "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" +
            esc(spec.title) + "</text>\n";
    svg_ += "<text class=\"x-label\" x=\"" + num((kLeft + kWidth - kRight) / 2) + "\" y=\"" +
            num(kHeight - 20) + "\" text-anchor=\"middle\" font-size=\"13\">" + esc(spec.x_label) + "</text>\n";
    svg_ += "<text class=\"y-label\" transform=\"translate(20," + num((kTop + kHeight - kBottom) / 2) +
            ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" + esc(spec.y_label) + "</text>\n";
  }

  void legend(const std::vector<std::pair<std::string, std::string>>& entries) {
    double y = kTop + 10;
    const double x = kWidth - kRight + 20;
    svg_ += "<g class=\"legend\">\n";
    for (const auto& [label, color] : entries) {
      svg_ += "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"5\" fill=\"" + color + "\"/>\n";
      svg_ += "<text x=\"" + num(x + 12) + "\" y=\"" + num(y + 4) + "\" font-size=\"12\">" + esc(label) + "</text>\n";
      y += 18;
    }
    svg_ += "</g>\n";
  }

 private:
  static std::string tick_text(double t, double step) {
    const int digits = step >= 1 ? 0 : static_cast<int>(std::ceil(-std::log10(step)));
    return fixed(std::abs(t) < step * 1e-9 ? 0.0 : t, digits);
  }

  Range x_, y_;
  std::string svg_;
};

std::string header() {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::map<std::string, std::string> series_colors(const std::vector<SummaryRow>& rows) {
  std::set<std::string> keys;
  for (const auto& r : rows)
    if (r.stage != Stage::Reference) keys.insert(r.series_key());
  std::map<std::string, std::string> colors;
  std::size_t i = 0;
  for (const auto& k : keys) colors[k] = kPalette[i++ % std::size(kPalette)];
  colors["REF"] = kReferenceColor;
  return colors;
}

// Clips the ray from the origin through (x, y) to the plot box.
std::pair<double, double> ray_end(const Canvas& c, double x, double y) {
  double t_max = 1e300;
  auto limit = [&](double d, double lo, double hi) {
    if (d > 0) t_max = std::min(t_max, hi / d);
    else if (d < 0) t_max = std::min(t_max, lo / d);
  };
  limit(x, c.x().lo, c.x().hi);
  limit(y, c.y().lo, c.y().hi);
  if (!(t_max < 1e300)) t_max = 1.0;
  return {x * t_max, y * t_max};
}

std::string scatter(const PlotSpec& spec, const std::vector<SummaryRow>& rows, bool test) {
  auto xv = [&](const SummaryRow& r) { return test ? r.test_reward : r.train_reward; };
  auto yv = [&](const SummaryRow& r) { return test ? r.test_success_rate : r.train_success_rate; };
  double xlo = 0, xhi = 0, ylo = 0, yhi = 0;
  for (const auto& r : rows) {
    xlo = std::min(xlo, xv(r));
    xhi = std::max(xhi, xv(r));
    ylo = std::min(ylo, yv(r));
    yhi = std::max(yhi, yv(r));
  }
  Canvas c(padded(xlo, xhi), padded(ylo, std::max(yhi, 1.0)));
  std::string svg = header();
  c.axes(spec, true);
  const auto colors = series_colors(rows);
  auto& out = c.out();
  for (const auto& r : rows) {
    const bool ref = r.stage == Stage::Reference && spec.highlight_reference;
    const double x = c.px(xv(r)), y = c.py(yv(r));
    if (ref) {
      const auto [ex, ey] = ray_end(c, xv(r), yv(r));
      out += "<line class=\"guide\" x1=\"" + num(c.px(0)) + "\" y1=\"" + num(c.py(0)) + "\" x2=\"" +
             num(c.px(ex)) + "\" y2=\"" + num(c.py(ey)) + "\" stroke=\"" + kReferenceColor +
             "\" stroke-dasharray=\"4 4\"/>\n";
      out += "<circle class=\"point reference\" data-id=\"" + std::to_string(r.id) + "\" cx=\"" + num(x) +
             "\" cy=\"" + num(y) + "\" r=\"7\" fill=\"" + kReferenceColor + "\" stroke=\"black\"/>\n";
    } else {
      out += "<circle class=\"point\" data-id=\"" + std::to_string(r.id) + "\" cx=\"" + num(x) + "\" cy=\"" +
             num(y) + "\" r=\"4.5\" fill=\"" + colors.at(r.series_key()) + "\"/>\n";
    }
    out += "<text class=\"point-label\" x=\"" + num(x + 6) + "\" y=\"" + num(y - 6) + "\" font-size=\"9\">" +
           std::to_string(r.id) + "</text>\n";
  }
  std::vector<std::pair<std::string, std::string>> legend;
  for (const auto& [k, col] : colors)
    if (k != "REF") legend.emplace_back(k, col);
  if (std::ranges::any_of(rows, [](const auto& r) { return r.stage == Stage::Reference; }))
    legend.emplace_back("REF", kReferenceColor);
  c.legend(legend);
  return svg + out + "</svg>\n";
}

std::string series(const PlotSpec& spec, const std::vector<SummaryRow>& all) {
  std::vector<SummaryRow> rows;
  const SummaryRow* ref = nullptr;
  for (const auto& r : all) {
    if (r.bonus == spec.series_bonus && r.stage == spec.series_stage) rows.push_back(r);
    if (r.stage == Stage::Reference) ref = &r;
  }
  std::ranges::sort(rows, {}, &SummaryRow::probability);
  Canvas c({0, 100}, {0, 1});
  std::string svg = header();
  PlotSpec titled = spec;
  if (!rows.empty()) titled.title += " [xx:" + rows.front().series_key() + "]";
  c.axes(titled, true);
  auto& out = c.out();
  const std::string color = kPalette[0];
  if (ref && spec.highlight_reference) {
    out += "<line class=\"reference-level\" x1=\"" + num(c.px(0)) + "\" y1=\"" + num(c.py(ref->test_success_rate)) +
           "\" x2=\"" + num(c.px(100)) + "\" y2=\"" + num(c.py(ref->test_success_rate)) + "\" stroke=\"" +
           kReferenceColor + "\" stroke-dasharray=\"4 4\"/>\n";
  }
  if (rows.size() > 1) {
    out += "<polyline class=\"series-line\" fill=\"none\" stroke=\"" + color + "\" points=\"";
    for (const auto& r : rows) out += num(c.px(r.probability)) + "," + num(c.py(r.test_success_rate)) + " ";
    out += "\"/>\n";
  }
  for (const auto& r : rows) {
    out += "<circle class=\"point\" data-id=\"" + std::to_string(r.id) + "\" cx=\"" + num(c.px(r.probability)) +
           "\" cy=\"" + num(c.py(r.test_success_rate)) + "\" r=\"4.5\" fill=\"" + color + "\"/>\n";
    out += "<text class=\"point-label\" x=\"" + num(c.px(r.probability) + 6) + "\" y=\"" +
           num(c.py(r.test_success_rate) - 6) + "\" font-size=\"9\">" + std::to_string(r.id) + "</text>\n";
  }
  std::vector<std::pair<std::string, std::string>> legend;
  if (!rows.empty()) legend.emplace_back(rows.front().series_key(), color);
  if (ref && spec.highlight_reference) legend.emplace_back("REF", kReferenceColor);
  c.legend(legend);
  return svg + out + "</svg>\n";
}

std::string bars(const PlotSpec& spec, const std::vector<SummaryRow>& rows) {
  struct Bar {
    const SummaryRow* row;
    double mean, sd;
  };
  std::vector<Bar> data;
  double lo = 0, hi = 0;
  for (const auto& r : rows) {
    double mean = r.test_reward, sd = 0.0;
    if (!r.seed_test_returns.empty()) {
      const auto n = static_cast<double>(r.seed_test_returns.size());
      mean = 0.0;
      for (double v : r.seed_test_returns) mean += v;
      mean /= n;
      for (double v : r.seed_test_returns) sd += (v - mean) * (v - mean);
      sd = std::sqrt(sd / n);
    }
    data.push_back({&r, mean, sd});
    lo = std::min(lo, mean - sd);
    hi = std::max(hi, mean + sd);
  }
  Canvas c({0, static_cast<double>(std::max<std::size_t>(data.size(), 1))}, padded(lo, hi));
  std::string svg = header();
  c.axes(spec, false);
  const auto colors = series_colors(rows);
  auto& out = c.out();
  const double slot = (kWidth - kLeft - kRight) / std::max<double>(1.0, static_cast<double>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& b = data[i];
    const bool ref = b.row->stage == Stage::Reference && spec.highlight_reference;
    const double x0 = c.px(static_cast<double>(i)) + slot * 0.15;
    const double w = slot * 0.7;
    const double ytop = c.py(std::max(b.mean, 0.0));
    const double ybot = c.py(std::min(b.mean, 0.0));
    const std::string color = ref ? kReferenceColor : colors.at(b.row->series_key());
    out += std::string("<rect class=\"bar") + (ref ? " reference" : "") + "\" data-id=\"" +
           std::to_string(b.row->id) + "\" x=\"" + num(x0) + "\" y=\"" + num(ytop) + "\" width=\"" + num(w) +
           "\" height=\"" + num(ybot - ytop) + "\" fill=\"" + color + "\"/>\n";
    const double xm = x0 + w / 2;
    out += "<line class=\"error-bar\" x1=\"" + num(xm) + "\" y1=\"" + num(c.py(b.mean - b.sd)) + "\" x2=\"" +
           num(xm) + "\" y2=\"" + num(c.py(b.mean + b.sd)) + "\" stroke=\"black\"/>\n";
    out += "<text class=\"point-label\" transform=\"translate(" + num(xm + 3) + "," + num(kHeight - kBottom + 8) +
           ") rotate(60)\" font-size=\"8\">" + esc(b.row->config().label()) + "</text>\n";
  }
  std::vector<std::pair<std::string, std::string>> legend;
  for (const auto& [k, col] : colors)
    if (k != "REF") legend.emplace_back(k, col);
  if (std::ranges::any_of(rows, [](const auto& r) { return r.stage == Stage::Reference; }))
    legend.emplace_back("REF", kReferenceColor);
  c.legend(legend);
  return svg + out + "</svg>\n";
}

}  // namespace

std::string render_plot(const PlotSpec& spec, const std::vector<SummaryRow>& rows) {
  require(!rows.empty(), "render_plot: no rows to plot");
  switch (spec.kind) {
    case PlotKind::ScatterTest: return scatter(spec, rows, true);
    case PlotKind::ScatterTrain: return scatter(spec, rows, false);
    case PlotKind::SeriesVsProbability: return series(spec, rows);
    case PlotKind::BarSummary: return bars(spec, rows);
  }
  return {};
}

std::vector<std::filesystem::path> write_report(const Summary& summary,
                                                const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& content) {
    const auto p = out_dir / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
    written.push_back(p);
  };
  put("summary.csv", summary_csv(summary.rows));
  put("summary.md", summary_markdown(summary.rows));
  if (summary.rows.empty()) return written;

  put("fig_test_scatter.svg", render_plot(default_plot_spec(PlotKind::ScatterTest), summary.rows));
  put("fig_train_scatter.svg", render_plot(default_plot_spec(PlotKind::ScatterTrain), summary.rows));
  put("fig_bar.svg", render_plot(default_plot_spec(PlotKind::BarSummary), summary.rows));
  std::set<std::pair<int, Stage>> series_keys;
  for (const auto& r : summary.rows)
    if (r.stage != Stage::Reference) series_keys.insert({r.bonus, r.stage});
  for (const auto& [b, n] : series_keys) {
    PlotSpec spec = default_plot_spec(PlotKind::SeriesVsProbability);
    spec.series_bonus = b;
    spec.series_stage = n;
    put("fig_series_" + std::to_string(b) + "_" + std::string(stage_label(n)) + ".svg",
        render_plot(spec, summary.rows));
  }
  return written;
}

}  // namespace sparsebonus

#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "sparsebonus/error.hpp"
#include "sparsebonus/experiment.hpp"

namespace sparsebonus {

const std::vector<GridCell>& paper_grid() {
  static const std::vector<GridCell> grid = [] {
    struct Series {
      std::vector<int> percents;
      int bonus;
      Stage stage;
    };
    const std::vector<int> six{0, 10, 30, 50, 70, 90};
    const std::vector<int> eight{0, 10, 30, 50, 60, 70, 80, 90};
    const std::vector<Series> series{
        {six, -15, Stage::NotGoal},
        {six, -10, Stage::NotGoal},
        {six, -5, Stage::NotGoal},
        {{0, 10, 20, 30, 50, 60, 70, 80}, -1, Stage::Both},
        {eight, -1, Stage::Goal},
        {eight, -1, Stage::NotGoal},
        {{100}, 0, Stage::Reference},
        {{0, 10, 20, 30, 40, 50, 60, 70, 80, 90}, 1, Stage::Both},
        {eight, 1, Stage::Goal},
        {eight, 1, Stage::NotGoal},
        {six, 10, Stage::Goal},
    };
    std::vector<GridCell> cells;
    int id = 1;
    for (const auto& s : series)
      for (int pct : s.percents) cells.push_back({id++, BonusConfig{pct / 100.0, s.bonus, s.stage}});
    return cells;
  }();
  return grid;
}

std::vector<ExperimentConfig> expand_grid(const ExperimentConfig& base) {
  std::vector<ExperimentConfig> out;
  for (const auto& cell : paper_grid()) {
    ExperimentConfig c = base;
    c.id = cell.id;
    c.bonus = cell.bonus;
    out.push_back(std::move(c));
  }
  return out;
}

const GridCell* find_grid_cell(const BonusConfig& bonus) {
  for (const auto& cell : paper_grid())
    if (cell.bonus.label() == bonus.label()) return &cell;
  return nullptr;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  const auto tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, p);
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

std::map<int, ManifestEntry> read_manifest(const std::filesystem::path& dir) {
  std::map<int, ManifestEntry> entries;
  std::ifstream in(dir / kManifestName);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      f.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (f.size() < 5) continue;
    ManifestEntry e;
    e.id = std::stoi(f[0]);
    e.label = f[1];
    e.status = f[2];
    e.checksum = f[3];
    e.file = f[4];
    if (f.size() > 5) e.note = f[5];
    entries[e.id] = e;
  }
  return entries;
}

void write_manifest(const std::filesystem::path& dir, const std::map<int, ManifestEntry>& entries) {
  std::string out = "# id\tlabel\tstatus\tchecksum\tfile\tnote\n";
  for (const auto& [id, e] : entries)
    out += std::to_string(id) + '\t' + e.label + '\t' + e.status + '\t' + e.checksum + '\t' + e.file +
           '\t' + sanitize(e.note) + '\n';
  write_file(dir / kManifestName, out);
}

GridReport run_grid(const std::vector<ExperimentConfig>& grid, const std::filesystem::path& out,
                    int parallelism) {
  {
    std::set<int> ids;
    for (const auto& c : grid)
      if (!ids.insert(c.id).second)
        throw ConfigError("run_grid: duplicate config id " + std::to_string(c.id));
  }
  std::filesystem::create_directories(out);
  auto manifest = read_manifest(out);

  std::vector<const ExperimentConfig*> pending;
  GridReport report;
  for (const auto& c : grid) {
    auto it = manifest.find(c.id);
    if (it != manifest.end() && it->second.status == "done" &&
        it->second.label == c.bonus.label() &&
        fnv1a_hex(slurp(out / it->second.file)) == it->second.checksum) {
      ++report.skipped;
      continue;
    }
    pending.push_back(&c);
  }

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pending.size()) return;
      const ExperimentConfig& c = *pending[i];
      const std::string stem = c.stem();
      ManifestEntry entry{c.id, c.bonus.label(), "done", "", stem + ".csv", ""};
      std::vector<MetricsRow> partial;
      try {
        write_file(out / (stem + ".json"), c.to_json_text());
        auto result = train(c, [&](const MetricsRow& row) { partial.push_back(row); });
        const std::string csv = metrics_csv(result.metrics);
        write_file(out / entry.file, csv);
        std::string seeds = "seed,test_sr,test_return\n";
        for (const auto& s : result.final_eval.per_seed)
          seeds += std::to_string(s.seed) + ',' + format_real(s.success_rate) + ',' +
                   format_real(s.mean_return) + '\n';
        write_file(out / (stem + ".seeds.csv"), seeds);
        std::ostringstream ckpt;
        result.checkpoint.write(ckpt);
        write_file(out / (stem + ".ckpt"), ckpt.str());
        entry.checksum = fnv1a_hex(csv);
      } catch (const std::exception& e) {
        const std::string csv = metrics_csv(partial);
        try {
          write_file(out / entry.file, csv);
        } catch (...) {
        }
        entry.status = "failed";
        entry.checksum = fnv1a_hex(csv);
        entry.note = e.what();
      }
      std::lock_guard lock(mu);
      if (entry.status == "done") ++report.ran;
      else ++report.failed;
      manifest[c.id] = entry;
      write_manifest(out, manifest);
    }
  };

  const int workers = std::max(1, std::min<int>(parallelism, static_cast<int>(pending.size())));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return report;
}

}  // namespace sparsebonus

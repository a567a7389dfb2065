#include <filesystem>
#include <fstream>

#include "cli_support.hpp"
#include "doctest.h"

using test_support::run_cli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("sparsebonus_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("expect reproduces the reference and balanced-bonus episode returns") {
  const auto ref = run_cli("expect --bonus 100:0:REF --horizon 60 --steps-to-goal 30");
  CHECK(ref.exit_code == 0);
  CHECK(ref.output.find("expected episode return (horizon=60, goal at step 30): -30\n") != std::string::npos);
  const auto both = run_cli("expect --bonus 50:+1:B --horizon 60 --steps-to-goal 30");
  CHECK(both.exit_code == 0);
  CHECK(both.output.find("expected episode return (horizon=60, goal at step 30): 0\n") != std::string::npos);
  const auto ng = run_cli("expect --bonus 50:-5:NG");
  CHECK(ng.output.find("expected training reward NG: -3.5\n") != std::string::npos);
}

TEST_CASE("bad input exits 2") {
  CHECK(run_cli("expect --bonus 50:+1:X").exit_code == 2);
  CHECK(run_cli("train --env fetch --out /tmp/sparsebonus_cli_never").exit_code == 2);
  CHECK(run_cli("train --config /nonexistent/config.json").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("eval").exit_code == 2);
}

TEST_CASE("verify exit status follows the checks") {
  CHECK(run_cli("verify --iterations 100000").exit_code == 0);
  const auto neg = run_cli("verify --iterations 100000 --oracle-her-ratio 0.5");
  CHECK(neg.exit_code == 1);
  CHECK(neg.output.find("FAIL") != std::string::npos);
}

TEST_CASE("train, eval and report round trip through files") {
  const auto dir = fresh_dir("train");
  std::ofstream(dir / "config.json")
      << R"({"env": "point_reach", "bonus": "30:-5:NG", "test_seeds": [1001, 1002],
            "schedule": {"epochs": 2, "cycles": 1, "episodes_per_cycle": 2,
                         "optimizer_steps_per_cycle": 1, "test_episodes": 2},
            "agent": {"hidden": [8]}, "her": {"batch_size": 16}})";
  const auto out = dir / "run";
  const auto t = run_cli("train --config " + (dir / "config.json").string() + " --out " + out.string());
  CHECK(t.exit_code == 0);
  CHECK(fs::exists(out / "metrics.csv"));
  CHECK(fs::exists(out / "checkpoint.ckpt"));
  CHECK(fs::exists(out / "config.json"));

  const auto e = run_cli("eval --checkpoint " + (out / "checkpoint.ckpt").string() + " --seed 1001 --episodes 3");
  CHECK(e.exit_code == 0);
  CHECK(e.output.find("success_rate") != std::string::npos);

  const auto empty = fresh_dir("empty");
  const auto r = run_cli("report --results " + empty.string() + " --out " + (dir / "report").string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("warning") != std::string::npos);
}

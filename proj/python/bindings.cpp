#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "sparsebonus/error.hpp"
#include "sparsebonus/experiment.hpp"
#include "sparsebonus/report.hpp"
#include "sparsebonus/verify.hpp"

namespace py = pybind11;
using namespace sparsebonus;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stochastic sparse-reward bonus laboratory: reward shaping, HER replay, DDPG, experiments.";

  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<TrainingDiverged>(m, "TrainingDiverged", PyExc_RuntimeError);

  py::class_<Rng>(m, "Rng")
      .def_static("seed_root", &Rng::seed_root, py::arg("seed"))
      .def("derive", &Rng::derive, py::arg("label"))
      .def("next_u64", &Rng::next_u64)
      .def("next_uniform", &Rng::next_uniform)
      .def("next_normal", &Rng::next_normal)
      .def_property_readonly("seed_path", &Rng::seed_path)
      .def("__eq__", [](const Rng& a, const Rng& b) { return a == b; });

  py::enum_<Stage>(m, "Stage")
      .value("NG", Stage::NotGoal)
      .value("G", Stage::Goal)
      .value("B", Stage::Both)
      .value("REF", Stage::Reference);

  py::class_<BonusConfig>(m, "BonusConfig")
      .def(py::init([](double p, int b, Stage stage) { return BonusConfig{p, b, stage}; }),
           py::arg("p"), py::arg("b"), py::arg("stage"))
      .def_static("parse", &BonusConfig::parse, py::arg("text"))
      .def_static("reference", &BonusConfig::reference)
      .def_readwrite("p", &BonusConfig::p)
      .def_readwrite("b", &BonusConfig::b)
      .def_readwrite("stage", &BonusConfig::stage)
      .def("label", &BonusConfig::label)
      .def("__repr__", [](const BonusConfig& c) { return "BonusConfig('" + c.label() + "')"; })
      .def("__eq__", [](const BonusConfig& a, const BonusConfig& b) { return a == b; });

  py::class_<ShapedReward>(m, "ShapedReward")
      .def_readonly("total", &ShapedReward::total)
      .def_readonly("base", &ShapedReward::base)
      .def_readonly("bonus_applied", &ShapedReward::bonus_applied);

  m.def("compute_reward",
        [](const std::vector<double>& ag, const std::vector<double>& g, double tol) {
          return compute_reward(ag, g, tol);
        },
        py::arg("achieved_goal"), py::arg("desired_goal"), py::arg("tolerance"));
  m.def("apply_bonus", &apply_bonus, py::arg("base"), py::arg("achieved"), py::arg("cfg"), py::arg("rng"));
  m.def("expected_step_reward", &expected_step_reward, py::arg("base"), py::arg("eligible"), py::arg("cfg"));
  m.def("expected_training_reward", &expected_training_reward, py::arg("cfg"), py::arg("her_ratio") = 0.8,
        py::arg("achieved"));
  m.def("expected_episode_return", &expected_episode_return, py::arg("cfg"), py::arg("horizon"),
        py::arg("steps_to_goal"));

  m.def("paper_grid", [] {
    py::list out;
    for (const auto& c : paper_grid()) out.append(py::make_tuple(c.id, c.bonus));
    return out;
  }, "List of (id, BonusConfig) rows of the experiment grid.");

  py::class_<MetricsRow>(m, "MetricsRow")
      .def_readonly("epoch", &MetricsRow::epoch)
      .def_readonly("train_sr", &MetricsRow::train_sr)
      .def_readonly("train_return", &MetricsRow::train_return)
      .def_readonly("test_sr", &MetricsRow::test_sr)
      .def_readonly("test_return", &MetricsRow::test_return)
      .def_readonly("cum_train_sr", &MetricsRow::cum_train_sr);

  m.def("train",
        [](const std::string& config_json) {
          const auto config = ExperimentConfig::from_json_text(config_json);
          TrainResult result;
          {
            py::gil_scoped_release release;
            result = train(config);
          }
          std::ostringstream ckpt;
          result.checkpoint.write(ckpt);
          return py::make_tuple(result.metrics, metrics_csv(result.metrics), ckpt.str());
        },
        py::arg("config_json"),
        "Train from a JSON config; returns (metrics rows, metrics CSV text, checkpoint text).");

  m.def("evaluate_checkpoint",
        [](const std::string& checkpoint_text, const std::vector<std::uint64_t>& seeds, int episodes) {
          std::istringstream in(checkpoint_text);
          const Checkpoint ckpt = Checkpoint::read(in);
          const DdpgAgent agent = ckpt.to_agent();
          const auto env = make_environment(ckpt.env);
          const auto r = evaluate(agent, *env, seeds, episodes);
          return py::make_tuple(r.success_rate, r.mean_return);
        },
        py::arg("checkpoint_text"), py::arg("seeds"), py::arg("episodes_per_seed") = 20);

  m.def("run_grid",
        [](const std::string& base_json, const std::vector<std::string>& labels, const std::filesystem::path& out,
           int parallel) {
          auto grid = expand_grid(ExperimentConfig::from_json_text(base_json));
          if (!labels.empty()) {
            std::vector<ExperimentConfig> subset;
            for (const auto& l : labels) {
              const auto* cell = find_grid_cell(BonusConfig::parse(l));
              if (!cell) throw ConfigError(l + " is not a grid configuration");
              subset.push_back(grid[static_cast<std::size_t>(cell->id - 1)]);
            }
            grid = std::move(subset);
          }
          GridReport r;
          {
            py::gil_scoped_release release;
            r = run_grid(grid, out, parallel);
          }
          return py::dict(py::arg("ran") = r.ran, py::arg("skipped") = r.skipped, py::arg("failed") = r.failed);
        },
        py::arg("base_config_json"), py::arg("labels"), py::arg("out"), py::arg("parallel") = 1);

  m.def("summarize",
        [](const std::filesystem::path& dir) {
          const auto s = summarize(dir);
          py::list rows;
          for (const auto& r : s.rows)
            rows.append(py::dict(py::arg("id") = r.id, py::arg("probability") = r.probability,
                                 py::arg("bonus") = r.bonus, py::arg("stage") = std::string(stage_label(r.stage)),
                                 py::arg("test_reward") = r.test_reward,
                                 py::arg("test_success_rate") = r.test_success_rate,
                                 py::arg("train_reward") = r.train_reward,
                                 py::arg("train_success_rate") = r.train_success_rate));
          return rows;
        },
        py::arg("results_dir"));

  m.def("verify_statistics",
        [](long long iterations, std::uint64_t seed, double oracle_her_ratio) {
          VerifyOptions o;
          o.iterations = iterations;
          o.seed = seed;
          o.oracle_her_ratio = oracle_her_ratio;
          const auto report = verify_statistics(o);
          py::list checks;
          for (const auto& c : report.checks)
            checks.append(py::dict(py::arg("name") = c.name, py::arg("measured") = c.measured,
                                   py::arg("expected") = c.expected, py::arg("tolerance") = c.tolerance,
                                   py::arg("passed") = c.passed));
          return py::make_tuple(report.passed(), checks);
        },
        py::arg("iterations") = 100'000, py::arg("seed") = 12345, py::arg("oracle_her_ratio") = 0.8);
}

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lll/experiment.hpp"

// Experiment runner: seeded, reproducible runs of the solvers and pipelines
// with machine-readable reports.
int main(int argc, char** argv) {
  CLI::App app{"LLL experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "execute an experiment config");
  run_cmd->add_option("config", config_path, "config JSON file")->required();

  std::string kind, graph_path, artifact_path;
  auto* val_cmd = app.add_subcommand("validate", "re-check an output artifact");
  val_cmd->add_option("kind", kind, "coloring | orientation | dss")->required();
  val_cmd->add_option("graph", graph_path, "edge-list file")->required();
  val_cmd->add_option("artifact", artifact_path, "artifact JSON file")->required();

  int budget = 1;
  uint64_t oracle_seed = 0;
  auto* oracle_cmd = app.add_subcommand("oracle-suite", "run the exact verification batteries");
  oracle_cmd->add_option("--budget", budget, "case-count multiplier");
  oracle_cmd->add_option("--seed", oracle_seed, "base seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "cannot open " << config_path << "\n";
        return 2;
      }
      nlohmann::json config;
      in >> config;
      const nlohmann::json report = lll::experiment::run(config);
      std::cout << report.dump(2) << "\n";
      const auto& agg = report["results"]["aggregate"];
      return agg["pass"] == agg["total"] ? 0 : 1;
    }
    if (val_cmd->parsed()) {
      const nlohmann::json out = lll::experiment::validate_output(kind, graph_path, artifact_path);
      std::cout << out.dump(2) << "\n";
      return out.value("pass", false) ? 0 : 1;
    }
    if (oracle_cmd->parsed()) {
      const nlohmann::json out = lll::experiment::oracle_suite(budget, oracle_seed);
      std::cout << out.dump(2) << "\n";
      return out.value("ok", false) ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

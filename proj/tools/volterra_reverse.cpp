#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "volterra/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Time reversal of Volterra-driven SDEs: experiment runner"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one experiment, or report-all");
  std::string experiment;
  std::string config_file;
  run->add_option("experiment", experiment, "experiment name")->required();
  run->add_option("--config", config_file, "flat key = value file; flags override it");

  // flags are kept as text and go through the same parser as the config file
  std::vector<std::pair<std::string, std::optional<std::string>>> flags = {
      {"seed", {}}, {"n", {}}, {"N", {}},  {"H", {}},       {"T", {}},       {"a", {}},
      {"x0", {}},   {"threads", {}}, {"outdir", {}}, {"h0", {}}, {"h1", {}}, {"eta_H", {}},
  };
  for (auto& [key, slot] : flags) run->add_option("--" + key, slot, key);
  std::vector<std::string> tolerances;
  run->add_option("--tol", tolerances, "threshold override, metric=value (repeatable)");

  auto* list = app.add_subcommand("list", "print experiment names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list->parsed()) {
    for (const auto& name : volterra::exp::experiment_names()) std::cout << name << "\n";
    return 0;
  }

  volterra::exp::ExperimentConfig cfg;
  try {
    if (!config_file.empty()) volterra::exp::apply_config_file(cfg, config_file);
    for (const auto& [key, slot] : flags)
      if (slot) volterra::exp::apply_config_value(cfg, key, *slot);
    for (const auto& t : tolerances) {
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw volterra::exp::UsageError("--tol expects metric=value");
      volterra::exp::apply_config_value(cfg, "tol." + t.substr(0, eq), t.substr(eq + 1));
    }
    cfg.experiment = experiment;
  } catch (const volterra::exp::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }
  return volterra::exp::run(cfg, std::cerr);
}

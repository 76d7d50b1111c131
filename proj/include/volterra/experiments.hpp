#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace volterra::exp {

// Raised for bad configurations and unknown experiments (exit status 2).
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 42;
  std::optional<std::size_t> n;  // unset: per-experiment default
  std::optional<std::size_t> N;
  std::optional<double> H;
  // affine H(t) = h0 + h1 t for the multifractional family
  double h0 = 0.6;
  double h1 = 0.2;
  double eta_H = 0.55;
  double T = 1.0;
  double a = 0.5;
  double x0 = 1.0;
  std::string outdir = "out";
  std::size_t threads = 0;
  std::map<std::string, double> tolerances;  // overrides, keyed by metric name
};

struct Threshold {
  double value = 0.0;
  std::string relation;  // one of <=, <, >=, >
};

// Every metric an experiment may emit, with its default threshold.
const std::map<std::string, Threshold>& default_thresholds();

const std::vector<std::string>& experiment_names();

// Flat `key = value` text with `#` comments. Unknown keys raise UsageError.
void apply_config_text(ExperimentConfig& cfg, const std::string& text);
void apply_config_file(ExperimentConfig& cfg, const std::string& path);
// Single assignment, also used for command-line overrides.
void apply_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Range checks on the numeric fields, before anything runs.
void validate_config(const ExperimentConfig& cfg);

struct Metric {
  std::string name;
  double value = 0.0;
  Threshold threshold;
  bool pass = false;
};

struct ExperimentResult {
  std::string experiment;
  std::vector<Metric> metrics;
  std::string error;  // non-empty when the run aborted
  bool pass = false;
};

// Runs one experiment (or all of them for report-all) and writes
// <outdir>/<experiment>/summary.json plus CSV tables.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream& log);

// 0 when every metric passes, 1 otherwise, 2 for usage errors.
int run(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace volterra::exp

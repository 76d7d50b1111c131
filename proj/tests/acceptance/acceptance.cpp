// Acceptance run: one line per criterion, exit status 1 if any fails.
// Criteria 1-10 read the metrics of one report-all run; criterion 11 repeats the
// run into a second directory and compares every artifact byte for byte.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "volterra/experiments.hpp"
#include "volterra/format.hpp"

namespace fs = std::filesystem;
using namespace volterra;

namespace {

struct Criterion {
  int id;
  std::string title;
  std::vector<std::string> metrics;  // "experiment/metric"
};

const std::vector<Criterion> kCriteria = {
    {1, "exact operator identities",
     {"ops-selftest/ibp_max_err", "ops-selftest/tau_projection_err", "ops-selftest/tau_involution_err",
      "ops-selftest/theta_involution_err", "ops-selftest/vcheck_levy_err"}},
    {2, "causality and quasi-nilpotence",
     {"causality/frac_strictly_causal_failures", "causality/trace_powers_max_abs",
      "causality/identity_partitions_passing", "causality/ideal_trace_max_abs"}},
    {3, "kernel correctness",
     {"fbm-cov/hyp2f1_at_zero_err", "fbm-cov/hyp2f1_ln2_err", "fbm-cov/kh_factorization_rel_err_H0.6",
      "fbm-cov/kh_factorization_rel_err_H0.75", "fbm-cov/kh_factorization_rel_err_H0.9"}},
    {4, "covariance", {"fbm-cov/gram_rel_err", "fbm-cov/mc_entries_outside_3se"}},
    {5, "trace machinery",
     {"trace-term/anticausal_trace_err", "trace-term/adapted_causal_trace_abs",
      "trace-term/reversed_adapted_trace_abs"}},
    {6, "reversal identity",
     {"reversal-identity/reversal_coef_discrepancy_levy", "reversal-identity/reversal_coef_discrepancy_stationary",
      "reversal-identity/reversal_coef_discrepancy_multifractional"}},
    {7, "stratonovich chain rule",
     {"strato-chainrule/chain_rule_mean_rel_err", "strato-chainrule/strato_refinement_ratio",
      "strato-chainrule/strato_refinement_ratio_next_finest"}},
    {8, "sde pipeline",
     {"sde-linear/linear_X_mean_rel_err", "sde-linear/linear_X_err_ratio_n512_n64", "sde-linear/zero_sigma_err",
      "sde-linear/additive_X_err", "sde-linear/additive_Y_err"}},
    {9, "flow property", {"sde-flow/linear_flow_residual_ratio_n512_n64", "sde-flow/additive_flow_residual"}},
    {10, "adaptedness audit", {"sde-flow/adaptedness_prefix_mismatches", "sde-flow/causality_future_reads"}},
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Files of a relative to b: missing or differing ones are listed.
std::vector<std::string> compare_trees(const fs::path& a, const fs::path& b, std::size_t& count) {
  std::vector<std::string> bad;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    ++count;
    const auto rel = fs::relative(e.path(), a);
    if (!fs::exists(b / rel) || slurp(e.path()) != slurp(b / rel)) bad.push_back(rel.string());
  }
  return bad;
}

}  // namespace

int main() {
  const auto root = fs::temp_directory_path() / "volterra_acceptance";
  fs::remove_all(root);

  exp::ExperimentConfig cfg;
  cfg.experiment = "report-all";
  cfg.seed = 42;
  cfg.outdir = (root / "a").string();

  std::ostringstream log;
  exp::ExperimentResult first;
  try {
    first = exp::run_experiment(cfg, log);
  } catch (const std::exception& e) {
    std::cout << "report-all aborted: " << e.what() << "\n";
    return 1;
  }
  std::map<std::string, const exp::Metric*> by_name;
  for (const auto& m : first.metrics) by_name[m.name] = &m;

  bool all = true;
  for (const auto& c : kCriteria) {
    bool ok = true;
    std::string detail;
    for (const auto& name : c.metrics) {
      const auto it = by_name.find(name);
      if (!detail.empty()) detail += ", ";
      const auto shortname = name.substr(name.find('/') + 1);
      if (it == by_name.end()) {
        ok = false;
        detail += shortname + "=missing";
        continue;
      }
      const auto& m = *it->second;
      ok = ok && m.pass;
      detail += shortname + "=" + format_double(m.value) + (m.pass ? "" : " (need " + m.threshold.relation + " " +
                                                                              format_double(m.threshold.value) + ")");
    }
    all = all && ok;
    std::cout << "criterion " << c.id << ' ' << (ok ? "PASS" : "FAIL") << ' ' << c.title << ": " << detail << "\n";
  }

  cfg.outdir = (root / "b").string();
  std::ostringstream log2;
  exp::run_experiment(cfg, log2);
  std::size_t files = 0, files_b = 0;
  auto diff = compare_trees(root / "a", root / "b", files);
  const auto diff_b = compare_trees(root / "b", root / "a", files_b);
  diff.insert(diff.end(), diff_b.begin(), diff_b.end());
  const bool repro = diff.empty() && files > 0 && files == files_b;
  all = all && repro;
  std::cout << "criterion 11 " << (repro ? "PASS" : "FAIL") << " reproducibility: " << files
            << " artifacts compared, " << diff.size() << " differ";
  if (!diff.empty()) std::cout << " (first: " << diff.front() << ")";
  std::cout << "\n";

  fs::remove_all(root);
  return all ? EXIT_SUCCESS : EXIT_FAILURE;
}

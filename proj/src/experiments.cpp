#include "volterra/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "volterra/format.hpp"
#include "volterra/fractional_calculus.hpp"
#include "volterra/grid.hpp"
#include "volterra/matrix.hpp"
#include "volterra/operator_algebra.hpp"
#include "volterra/parallel.hpp"
#include "volterra/reversal_sde.hpp"
#include "volterra/rng.hpp"
#include "volterra/stochastic_integration.hpp"
#include "volterra/volterra_process.hpp"

namespace volterra::exp {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

const std::map<std::string, Threshold>& default_thresholds() {
  static const std::map<std::string, Threshold> table = {
      // ops-selftest
      {"ibp_max_err", {1e-10, "<="}},
      {"tau_projection_err", {1e-10, "<="}},
      {"tau_involution_err", {1e-10, "<="}},
      {"theta_involution_err", {1e-10, "<="}},
      {"vcheck_levy_err", {1e-10, "<="}},
      {"adjoint_involution_err", {1e-10, "<="}},
      {"semigroup_refinement_ratio", {2.0, ">="}},
      // causality
      {"frac_strictly_causal_failures", {0.0, "<="}},
      {"trace_powers_max_abs", {0.0, "<="}},
      {"identity_partitions_passing", {0.0, "<="}},
      {"ideal_trace_max_abs", {1e-10, "<="}},
      {"levy_causality_violation", {1e-12, "<="}},
      // fbm-cov
      {"hyp2f1_at_zero_err", {1e-10, "<="}},
      {"hyp2f1_ln2_err", {1e-10, "<="}},
      {"kh_factorization_rel_err_H0.6", {1e-3, "<"}},
      {"kh_factorization_rel_err_H0.75", {1e-3, "<"}},
      {"kh_factorization_rel_err_H0.9", {1e-3, "<"}},
      {"gram_rel_err", {2e-2, "<"}},
      {"mc_entries_outside_3se", {0.0, "<="}},
      {"mbm_gram_diag_rel_err", {5e-2, "<"}},
      // trace-term
      {"anticausal_trace_err", {5e-3, "<="}},
      {"adapted_causal_trace_abs", {1e-10, "<="}},
      {"reversed_adapted_trace_abs", {1e-10, "<="}},
      {"trace_composition_mismatch", {1e-10, "<="}},
      {"anticipating_step_mean_se", {3.0, "<="}},
      // strato-chainrule
      {"chain_rule_mean_rel_err", {5e-2, "<"}},
      {"strato_refinement_ratio", {4.0, ">="}},
      {"strato_refinement_ratio_next_finest", {4.0, ">="}},
      {"constant_integrand_finest_err", {1e-10, "<="}},
      // reversal-identity
      {"reversal_coef_discrepancy_levy", {1e-10, "<="}},
      {"reversal_coef_discrepancy_stationary", {1e-10, "<="}},
      {"reversal_coef_discrepancy_multifractional", {1e-10, "<="}},
      {"reversal_pathwise_residual", {1e-10, "<="}},
      // sde-linear
      {"linear_Y_mean_rel_err", {5e-2, "<"}},
      {"linear_X_mean_rel_err", {5e-2, "<"}},
      {"linear_X_err_ratio_n512_n64", {1.0, "<"}},
      {"zero_sigma_err", {1e-10, "<="}},
      {"additive_Y_err", {1e-10, "<="}},
      {"additive_X_err", {1e-10, "<="}},
      {"inversion_roundtrip_rel", {1e-8, "<="}},
      // sde-flow
      {"linear_flow_residual_ratio_n512_n64", {1.0, "<"}},
      {"additive_flow_residual", {1e-10, "<="}},
      {"zero_flow_residual", {0.0, "<="}},
      {"adaptedness_prefix_mismatches", {0.0, "<="}},
      {"adaptedness_min_suffix_change", {0.0, ">"}},
      {"causality_future_reads", {0.0, "<="}},
      // holder
      {"holder_exponent_err_H0.6", {0.12, "<="}},
      {"holder_exponent_err_H0.75", {0.12, "<="}},
      {"holder_exponent_err_H0.9", {0.12, "<="}},
      {"linear_moment_exponent_margin", {0.0, ">="}},
      {"additive_increment_max_se_dev", {3.0, "<="}},
      {"zero_moment_err", {1e-10, "<="}},
  };
  return table;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"ops-selftest",      "causality",         "fbm-cov",
                                                 "trace-term",        "strato-chainrule",  "reversal-identity",
                                                 "sde-linear",        "sde-flow",          "holder",
                                                 "report-all"};
  return names;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw UsageError("config: '" + key + "' expects a number, got '" + v + "'");
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw UsageError("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
  return out;
}

}  // namespace

void apply_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "experiment") {
    cfg.experiment = value;
  } else if (key == "seed") {
    cfg.seed = parse_uint(key, value);
  } else if (key == "n") {
    cfg.n = static_cast<std::size_t>(parse_uint(key, value));
  } else if (key == "N") {
    cfg.N = static_cast<std::size_t>(parse_uint(key, value));
  } else if (key == "H") {
    cfg.H = parse_double(key, value);
  } else if (key == "h0") {
    cfg.h0 = parse_double(key, value);
  } else if (key == "h1") {
    cfg.h1 = parse_double(key, value);
  } else if (key == "eta_H") {
    cfg.eta_H = parse_double(key, value);
  } else if (key == "T") {
    cfg.T = parse_double(key, value);
  } else if (key == "a") {
    cfg.a = parse_double(key, value);
  } else if (key == "x0") {
    cfg.x0 = parse_double(key, value);
  } else if (key == "outdir") {
    cfg.outdir = value;
  } else if (key == "threads") {
    cfg.threads = static_cast<std::size_t>(parse_uint(key, value));
  } else if (key.rfind("tol.", 0) == 0) {
    const std::string metric = key.substr(4);
    if (!default_thresholds().count(metric)) throw UsageError("config: no metric named '" + metric + "'");
    cfg.tolerances[metric] = parse_double(key, value);
  } else {
    throw UsageError("config: unknown key '" + key + "'");
  }
}

void apply_config_text(ExperimentConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    apply_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  apply_config_text(cfg, ss.str());
}

void validate_config(const ExperimentConfig& cfg) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), cfg.experiment) == names.end())
    throw UsageError("unknown experiment '" + cfg.experiment + "'");
  if (cfg.n && (*cfg.n < 16 || *cfg.n > 4096)) throw UsageError("n must lie in [16, 4096]");
  if (cfg.N && (*cfg.N < 2 || *cfg.N > 1000000)) throw UsageError("N must lie in [2, 1e6]");
  if (cfg.H && !(*cfg.H > 0.5 && *cfg.H < 1.0)) throw UsageError("H must lie in (1/2, 1)");
  if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) throw UsageError("T must be positive");
  if (!std::isfinite(cfg.a) || !std::isfinite(cfg.x0)) throw UsageError("a and x0 must be finite");
  if (!(cfg.eta_H > 0.5)) throw UsageError("eta_H must exceed 1/2");
  const double lo = std::min(cfg.h0, cfg.h0 + cfg.h1 * cfg.T), hi = std::max(cfg.h0, cfg.h0 + cfg.h1 * cfg.T);
  if (!(lo > cfg.eta_H && hi < 1.0)) throw UsageError("affine H(t) must stay in (eta_H, 1) on [0,T]");
  if (cfg.threads > 1024) throw UsageError("threads must be at most 1024");
  if (cfg.outdir.empty()) throw UsageError("outdir must not be empty");
}

namespace {

// ---------------------------------------------------------------------------
// plumbing

class Recorder {
 public:
  explicit Recorder(const ExperimentConfig& cfg) : cfg_(cfg) {}

  void add(const std::string& name, double value) {
    auto it = default_thresholds().find(name);
    if (it == default_thresholds().end()) throw std::logic_error("metric without a threshold: " + name);
    Metric m;
    m.name = name;
    m.value = value;
    m.threshold = it->second;
    if (auto o = cfg_.tolerances.find(name); o != cfg_.tolerances.end()) m.threshold.value = o->second;
    const double t = m.threshold.value;
    const std::string& r = m.threshold.relation;
    if (std::isnan(value)) {
      m.pass = false;
    } else if (r == "<=") {
      m.pass = value <= t;
    } else if (r == "<") {
      m.pass = value < t;
    } else if (r == ">=") {
      m.pass = value >= t;
    } else {
      m.pass = value > t;
    }
    metrics.push_back(m);
  }

  std::vector<Metric> metrics;

 private:
  const ExperimentConfig& cfg_;
};

struct Run {
  const ExperimentConfig& cfg;
  fs::path dir;
  Recorder rec;
  ordered_json echo = ordered_json::object();
  std::ostream& log;

  std::size_t n(std::size_t def) const { return cfg.n.value_or(def); }
  std::size_t N(std::size_t def) const { return cfg.N.value_or(def); }
  double H(double def) const { return cfg.H.value_or(def); }

  std::ofstream csv(const std::string& name) const {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  }
};

std::string fd(double v) { return format_double(v); }

ordered_json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  return fd(v);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::vector<double> random_cells(std::uint64_t seed, std::uint32_t stream, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = rng::standard_normal(seed, stream, j, 0);
  return v;
}

std::shared_ptr<const process::VolterraModel> share(process::VolterraModel m) {
  return std::make_shared<const process::VolterraModel>(std::move(m));
}

frac::HurstSpec affine_spec(const ExperimentConfig& cfg) {
  const double h0 = cfg.h0, h1 = cfg.h1;
  return frac::HurstSpec::varying_fn([h0, h1](double t) { return h0 + h1 * t; }, cfg.eta_H);
}

// ---------------------------------------------------------------------------
// ops-selftest

void run_ops_selftest(Run& run) {
  const std::size_t n = run.n(256);
  const double H = run.H(0.75);
  run.echo["n"] = n;
  run.echo["H"] = H;
  const TimeGrid grid(run.cfg.T, n);
  const std::uint64_t seed = run.cfg.seed;

  double ibp = 0.0;
  std::uint32_t stream = 0;
  for (double g : {0.1, 0.25, 0.5, 0.75, 1.0}) {
    for (int rep = 0; rep < 5; ++rep) {
      const GridFunction f(grid, random_cells(seed, stream++, n));
      const GridFunction h(grid, random_cells(seed, stream++, n));
      const double lhs = inner(f, frac::left_frac_integral(g, h));
      const double rhs = inner(frac::right_frac_integral(g, f), h);
      ibp = std::max(ibp, std::abs(lhs - rhs));
    }
  }
  run.rec.add("ibp_max_err", ibp);

  const auto tau = ops::reverse_op(grid);
  double tp = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const auto ek = ops::projection_at(ops::Resolution::Forward, k, grid);
    const auto ec = ops::projection_at(ops::Resolution::Forward, n - k, grid);
    const Matrix lhs = multiply(tau.M, ek.M);
    const Matrix rhs = multiply(subtract(Matrix::identity(n), ec.M), tau.M);
    tp = std::max(tp, max_abs_diff(lhs, rhs));
  }
  run.rec.add("tau_projection_err", tp);

  const GridFunction f(grid, random_cells(seed, stream++, n));
  const GridFunction ff = ops::reverse(ops::reverse(f));
  double inv = 0.0;
  for (std::size_t j = 0; j < n; ++j) inv = std::max(inv, std::abs(ff.values[j] - f.values[j]));
  run.rec.add("tau_involution_err", inv);

  NodePath w(grid);
  const auto inc = random_cells(seed, stream++, n);
  for (std::size_t k = 0; k < n; ++k) w.at(k + 1) = w.at(k) + inc[k] * std::sqrt(grid.dt());
  const NodePath ww = ops::path_reversal_theta(ops::path_reversal_theta(w));
  double th = 0.0;
  for (std::size_t k = 0; k <= n; ++k) th = std::max(th, std::abs(ww.at(k) - w.at(k)));
  run.rec.add("theta_involution_err", th);

  const auto levy = process::build_levy_operator(H, grid);
  const auto vcheck = ops::reversed_operator(levy);
  run.rec.add("vcheck_levy_err", max_abs_diff(vcheck.M, frac::left_frac_matrix(H - 0.5, grid)));
  run.rec.add("adjoint_involution_err", max_abs_diff(ops::adjoint(ops::adjoint(levy)).M, levy.M));

  // I^0.3 I^0.4 1 against I^0.7 1 on two grids
  auto semigroup_err = [&](std::size_t m) {
    const TimeGrid g(run.cfg.T, m);
    const GridFunction one(g, 1, 1.0);
    const auto lhs = frac::left_frac_integral(0.3, frac::left_frac_integral(0.4, one));
    const auto rhs = frac::left_frac_integral(0.7, one);
    double e = 0.0;
    for (std::size_t j = 0; j < m; ++j) e = std::max(e, std::abs(lhs.values[j] - rhs.values[j]));
    return e;
  };
  const double e128 = semigroup_err(128), e1024 = semigroup_err(1024);
  run.rec.add("semigroup_refinement_ratio", e128 / e1024);
  auto out = run.csv("semigroup.csv");
  out << "n,max_abs_err\n128," << fd(e128) << "\n1024," << fd(e1024) << "\n";
}

// ---------------------------------------------------------------------------
// causality

void run_causality(Run& run) {
  const std::size_t n = run.n(128);
  const double H = run.H(0.75);
  const double eps = 1e-3;
  run.echo["n"] = n;
  run.echo["H"] = H;
  run.echo["eps"] = eps;
  const TimeGrid grid(run.cfg.T, n);

  auto out = run.csv("strict_causality.csv");
  out << "operator,resolution,strictly_causal,blocks,largest_block_norm\n";
  std::size_t failures = 0;
  double tp_max = 0.0;
  auto tr = run.csv("trace_powers.csv");
  tr << "operator,k,trace\n";
  struct Case {
    std::string name;
    ops::DiscreteOperator V;
    ops::Resolution E;
  };
  std::vector<Case> cases;
  for (double g : {0.1, 0.25, H - 0.5, 1.0}) {
    cases.push_back({"left_frac_" + fd(g), frac::left_frac_operator(g, grid), ops::Resolution::Forward});
    cases.push_back({"right_frac_" + fd(g), frac::right_frac_operator(g, grid), ops::Resolution::Reversed});
  }
  for (const auto& c : cases) {
    const auto rep = ops::is_strictly_causal(c.V, c.E, eps);
    if (!rep.strictly_causal) ++failures;
    out << c.name << ',' << (c.E == ops::Resolution::Forward ? "forward" : "reversed") << ','
        << (rep.strictly_causal ? 1 : 0) << ',' << (rep.partition.empty() ? 0 : rep.partition.size() - 1) << ','
        << fd(rep.largest_block_norm) << "\n";
    const auto tps = ops::trace_powers(c.V, 10);
    for (std::size_t k = 0; k < tps.size(); ++k) {
      tp_max = std::max(tp_max, std::abs(tps[k]));
      tr << c.name << ',' << (k + 1) << ',' << fd(tps[k]) << "\n";
    }
  }
  run.rec.add("frac_strictly_causal_failures", static_cast<double>(failures));
  run.rec.add("trace_powers_max_abs", tp_max);

  // identity: every dyadic level keeps a block of norm 1
  const ops::DiscreteOperator id(grid, Matrix::identity(n));
  std::size_t passing = 0;
  for (std::size_t blocks = 1;; blocks *= 2) {
    const auto part = ops::dyadic_partition(grid, blocks);
    double worst = 0.0;
    for (std::size_t l = 0; l + 1 < part.size(); ++l) {
      const std::size_t a = part[l], b = part[l + 1];
      Matrix blk(b - a, b - a);
      for (std::size_t i = a; i < b; ++i) blk(i - a, i - a) = 1.0;
      worst = std::max(worst, spectral_norm(blk));
    }
    if (worst < eps) ++passing;
    if (blocks >= n) break;
  }
  if (ops::is_strictly_causal(id, ops::Resolution::Forward, eps).strictly_causal) ++passing;
  run.rec.add("identity_partitions_passing", static_cast<double>(passing));

  // causal (lower, with diagonal) times strictly causal (strictly lower)
  const auto strict = frac::left_frac_operator(0.25, grid);
  double ideal = 0.0;
  for (std::uint32_t k = 0; k < 100; ++k) {
    Matrix A(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) A(i, j) = rng::standard_normal(run.cfg.seed, 1000 + k, i * n + j, 0);
    ideal = std::max(ideal, std::abs(volterra::trace(multiply(A, strict.M))));
    ideal = std::max(ideal, std::abs(volterra::trace(multiply(strict.M, A))));
  }
  run.rec.add("ideal_trace_max_abs", ideal);

  const auto levy = process::build_levy_operator(H, grid);
  run.rec.add("levy_causality_violation", ops::is_causal(levy, ops::Resolution::Reversed).max_violation);
}

// ---------------------------------------------------------------------------
// fbm-cov

double kh_table_rel_err(double H, const TimeGrid& grid) {
  const Matrix G = process::KH_indicator_table(H, grid);
  double worst = 0.0;
  for (std::size_t i = 2; i <= grid.n; ++i)
    for (std::size_t j = 0; j + 2 <= i; ++j) {
      const double ref = frac::kernel_KH(H, grid.node(i), grid.node(j + 1));
      worst = std::max(worst, std::abs(G(i, j) - ref) / std::abs(ref));
    }
  return worst;
}

void run_fbm_cov(Run& run) {
  const std::size_t n = run.n(512);
  const std::size_t N = run.N(10000);
  const double H = run.H(0.7);
  run.echo["n"] = n;
  run.echo["N"] = N;
  run.echo["H"] = H;
  run.echo["h0"] = run.cfg.h0;
  run.echo["h1"] = run.cfg.h1;
  run.echo["eta_H"] = run.cfg.eta_H;
  const TimeGrid grid(run.cfg.T, n);

  run.rec.add("hyp2f1_at_zero_err", std::abs(frac::gauss_2f1(0.3, -0.7, 1.9, 0.0) - 1.0));
  run.rec.add("hyp2f1_ln2_err", std::abs(frac::gauss_2f1(1.0, 1.0, 2.0, -1.0) - std::numbers::ln2));

  {
    auto out = run.csv("kernel_check.csv");
    out << "H,max_rel_err\n";
    for (double h : {0.6, 0.75, 0.9}) {
      const double e = kh_table_rel_err(h, grid);
      out << fd(h) << ',' << fd(e) << "\n";
      run.rec.add("kh_factorization_rel_err_H" + fd(h), e);
    }
  }

  const auto model = process::make_stationary_model(H, grid);
  const Matrix C = process::covariance_gram(model);
  const double cH = process::stationary_fbm_variance_constant(H);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t k = 0; k <= n; ++k) {
      const double s = grid.node(i), t = grid.node(k);
      const double R = cH * 0.5 * (std::pow(s, 2 * H) + std::pow(t, 2 * H) - std::pow(std::abs(t - s), 2 * H));
      num = std::max(num, std::abs(C(i, k) - R));
      den = std::max(den, std::abs(R));
    }
  run.rec.add("gram_rel_err", num / den);
  {
    auto out = run.csv("gram.csv");
    process::write_gram_csv(out, C, H);
  }

  // Monte Carlo on the nodes kT/8
  std::vector<std::size_t> nodes;
  for (std::size_t k = 1; k <= 8; ++k) nodes.push_back(grid.snap(static_cast<double>(k) * grid.T / 8.0));
  const std::size_t m = nodes.size();
  std::vector<std::vector<double>> vals(N, std::vector<double>(m));
  parallel_for(N, run.cfg.threads, [&](std::size_t p) {
    const auto drv = process::make_driver(run.cfg.seed, static_cast<std::uint32_t>(p), grid);
    for (std::size_t a = 0; a < m; ++a) {
      auto gi = model.G.row(nodes[a]);
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += gi[j] * drv.increments[j];
      vals[p][a] = s;
    }
  });
  std::size_t outside = 0;
  auto out = run.csv("mc_covariance.csv");
  out << "t_i,t_k,gram,mc,se\n";
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a; b < m; ++b) {
      double s = 0.0;
      for (std::size_t p = 0; p < N; ++p) s += vals[p][a] * vals[p][b];
      const double mean = s / static_cast<double>(N);
      double v = 0.0;
      for (std::size_t p = 0; p < N; ++p) {
        const double d = vals[p][a] * vals[p][b] - mean;
        v += d * d;
      }
      const double se = std::sqrt(v / static_cast<double>(N - 1) / static_cast<double>(N));
      const double g = C(nodes[a], nodes[b]);
      if (std::abs(mean - g) > 3.0 * se) ++outside;
      out << fd(grid.node(nodes[a])) << ',' << fd(grid.node(nodes[b])) << ',' << fd(g) << ',' << fd(mean) << ','
          << fd(se) << "\n";
    }
  run.rec.add("mc_entries_outside_3se", static_cast<double>(outside));

  {
    auto p = run.csv("path.csv");
    process::write_path_csv(p, process::sample_path(model, process::make_driver(run.cfg.seed, 0, grid)));
  }

  // multifractional Gram diagonal against c_{H(t)} t^{2H(t)}
  const auto spec = affine_spec(run.cfg);
  const auto mbm = process::make_multifractional_model(spec, grid);
  const Matrix Cm = process::covariance_gram(mbm);
  double mnum = 0.0, mden = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = grid.node(i), h = spec.at(t);
    const double R = process::stationary_fbm_variance_constant(h) * std::pow(t, 2 * h);
    mnum = std::max(mnum, std::abs(Cm(i, i) - R));
    mden = std::max(mden, R);
  }
  run.rec.add("mbm_gram_diag_rel_err", mnum / mden);
}

// ---------------------------------------------------------------------------
// trace-term

void run_trace_term(Run& run) {
  const std::size_t n = run.n(512);
  const std::size_t N = run.N(2000);
  const double H = run.H(0.75);
  run.echo["n"] = n;
  run.echo["N"] = N;
  run.echo["H"] = H;
  const TimeGrid grid(run.cfg.T, n);
  const auto drv = process::make_driver(run.cfg.seed, 0, grid);
  auto id = [](double x) { return x; };
  auto one = [](double) { return 1.0; };

  // u = W for V = I^1_{T-}, gradient through the table of V itself
  const auto anti = frac::right_frac_operator(1.0, grid);
  const Matrix Ganti = process::indicator_column_table(anti);
  const auto ctx_anti = integ::make_context(drv, &Ganti);
  const auto u_anti = integ::CylindricalProcess::of_volterra(grid, id, one, integ::Sampling::Left);
  const auto tt = integ::trace_term(integ::gradient_matrix(u_anti, ctx_anti), anti);
  const double exact = std::pow(run.cfg.T, 3) / 6.0;
  run.rec.add("anticausal_trace_err", std::abs(tt.total - exact));
  double mismatch = std::abs(tt.total - tt.composition_trace);
  {
    auto out = run.csv("trace_density.csv");
    out << "r,density,closed_form\n";
    for (std::size_t j = 0; j < n; ++j) {
      const double r = grid.node(j);
      out << fd(r) << ',' << fd(tt.density[j]) << ',' << fd(r * r / 2.0) << "\n";
    }
  }

  // u = B under causal I^1_{0+}
  const auto causal = frac::left_frac_operator(1.0, grid);
  const auto ctx = integ::make_context(drv, nullptr);
  const auto u_b = integ::CylindricalProcess::of_driver(grid, id, one, integ::Sampling::Right);
  const auto tc = integ::trace_term(integ::gradient_matrix(u_b, ctx), causal);
  run.rec.add("adapted_causal_trace_abs", std::abs(tc.total));
  mismatch = std::max(mismatch, std::abs(tc.total - tc.composition_trace));

  // g(B-check) under the reversed Levy operator
  const auto levy = process::make_levy_model(H, grid);
  const auto rdrv = process::reversed_driver(drv);
  const auto rctx = integ::make_context(rdrv, nullptr);
  const auto u_r = integ::CylindricalProcess::of_driver(
      grid, [](double x) { return std::sin(x) + x * x; }, [](double x) { return std::cos(x) + 2 * x; },
      integ::Sampling::Trapezoid);
  u_r.validate();
  const auto trr = integ::trace_term(integ::gradient_matrix(u_r, rctx), levy.Vcheck);
  run.rec.add("reversed_adapted_trace_abs", std::abs(trr.total));
  mismatch = std::max(mismatch, std::abs(trr.total - trr.composition_trace));
  run.rec.add("trace_composition_mismatch", mismatch);

  // F = B(T) on a single block: E delta = 0
  std::vector<double> d(N);
  const std::vector<std::size_t> part = {0, n};
  parallel_for(N, run.cfg.threads, [&](std::size_t p) {
    const auto dp = process::make_driver(run.cfg.seed, static_cast<std::uint32_t>(1000 + p), grid);
    double bt = 0.0;
    for (double v : dp.increments) bt += v;
    integ::StepCoefficient F;
    F.value = bt;
    F.block_gradient.assign(n, 1.0);
    d[p] = integ::skorokhod_step_integral(part, {F}, dp.increments, grid.dt());
  });
  const double mean = mean_of(d);
  double v = 0.0;
  for (double x : d) v += (x - mean) * (x - mean);
  const double se = std::sqrt(v / static_cast<double>(N - 1) / static_cast<double>(N));
  run.rec.add("anticipating_step_mean_se", std::abs(mean) / se);
}

// ---------------------------------------------------------------------------
// strato-chainrule

void run_strato(Run& run) {
  const std::size_t n = run.n(512);
  const std::size_t N = run.N(200);
  const double H = run.H(0.7);
  run.echo["n"] = n;
  run.echo["N"] = N;
  run.echo["H"] = H;
  run.echo["sampling"] = "trapezoid";
  const TimeGrid grid(run.cfg.T, n);
  const auto model = process::make_stationary_model(H, grid);
  const auto u = integ::CylindricalProcess::of_volterra(
      grid, [](double x) { return x; }, [](double) { return 1.0; }, integ::Sampling::Trapezoid);
  u.validate();
  const auto unit = integ::CylindricalProcess::deterministic(grid, std::vector<double>(n, 1.0));

  struct PathOut {
    std::vector<integ::RefinementRow> table;
    double rel = 0.0;
    double WT = 0.0;
    double unit_err = 0.0;
  };
  std::vector<PathOut> res(N);
  parallel_for(N, run.cfg.threads, [&](std::size_t p) {
    const auto drv = process::make_driver(run.cfg.seed, static_cast<std::uint32_t>(p), grid);
    const auto ctx = integ::make_context(drv, &model.G);
    const auto s = integ::stratonovich_integral(u, model.V, ctx);
    const double WT = ctx.W.at(n);
    PathOut o;
    o.table = s.table;
    o.WT = WT;
    o.rel = std::abs(s.reference - 0.5 * WT * WT) / (0.5 * WT * WT);
    const auto su = integ::stratonovich_integral(unit, model.V, ctx);
    o.unit_err = std::abs(su.table.back().R_pi - WT);
    res[p] = std::move(o);
  });

  std::vector<double> rel;
  double unit_err = 0.0;
  const std::size_t levels = res[0].table.size();
  std::vector<double> mean_err(levels, 0.0);
  for (const auto& o : res) {
    rel.push_back(o.rel);
    unit_err = std::max(unit_err, o.unit_err);
    for (std::size_t l = 0; l < levels; ++l) mean_err[l] += o.table[l].abs_err / static_cast<double>(N);
  }
  run.rec.add("chain_rule_mean_rel_err", mean_of(rel));
  // the finest partition reproduces the reference term by term, so its error is
  // zero up to rounding and the ratio may be +inf; the next-to-finest ratio is
  // reported alongside as a non-degenerate check
  const double inf = std::numeric_limits<double>::infinity();
  run.rec.add("strato_refinement_ratio", mean_err.back() > 0.0 ? mean_err.front() / mean_err.back() : inf);
  run.rec.add("strato_refinement_ratio_next_finest", mean_err.front() / mean_err[levels - 2]);
  run.rec.add("constant_integrand_finest_err", unit_err);

  {
    auto out = run.csv("convergence.csv");
    integ::write_refinement_csv(out, res[0].table);
  }
  auto out = run.csv("mean_errors.csv");
  out << "mesh,mean_abs_err\n";
  for (std::size_t l = 0; l < levels; ++l) out << fd(res[0].table[l].mesh) << ',' << fd(mean_err[l]) << "\n";
}

// ---------------------------------------------------------------------------
// reversal-identity

void run_reversal_identity(Run& run) {
  const std::size_t n = run.n(256);
  const double H = run.H(0.75);
  run.echo["n"] = n;
  run.echo["H"] = H;
  run.echo["h0"] = run.cfg.h0;
  run.echo["h1"] = run.cfg.h1;
  run.echo["eta_H"] = run.cfg.eta_H;
  const TimeGrid grid(run.cfg.T, n);
  const std::uint64_t seed = run.cfg.seed;

  std::vector<std::pair<std::string, process::VolterraModel>> families;
  families.emplace_back("levy", process::make_levy_model(H, grid));
  families.emplace_back("stationary", process::make_stationary_model(H, grid));
  families.emplace_back("multifractional", process::make_multifractional_model(affine_spec(run.cfg), grid));

  std::vector<process::BrownianDriver> drivers;
  for (std::uint32_t k = 0; k < 4; ++k) drivers.push_back(process::make_driver(seed, 500 + k, grid));

  auto out = run.csv("windows.csv");
  out << "family,r,t,max_coef_discrepancy,pathwise_residual\n";
  double pathwise = 0.0;
  for (const auto& [name, model] : families) {
    double worst = 0.0;
    for (std::uint32_t w = 0; w < 20; ++w) {
      std::size_t r = static_cast<std::size_t>(rng::uniform01(seed, 200, w, 0) * static_cast<double>(n + 1));
      std::size_t t = static_cast<std::size_t>(rng::uniform01(seed, 200, w, 1) * static_cast<double>(n + 1));
      if (r > t) std::swap(r, t);
      double c[4];
      for (std::uint32_t q = 0; q < 4; ++q) c[q] = rng::standard_normal(seed, 201, w, q);
      std::vector<double> u(n);
      for (std::size_t j = 0; j < n; ++j) {
        const double s = grid.cell_mid(j);
        u[j] = c[0] + s * (c[1] + s * (c[2] + s * c[3]));
      }
      const auto res = integ::verify_reversal_identity(model, r, t, u, drivers);
      worst = std::max(worst, res.max_coef_discrepancy);
      pathwise = std::max(pathwise, res.pathwise_residual);
      out << name << ',' << r << ',' << t << ',' << fd(res.max_coef_discrepancy) << ','
          << fd(res.pathwise_residual) << "\n";
    }
    run.rec.add("reversal_coef_discrepancy_" + name, worst);
  }
  run.rec.add("reversal_pathwise_residual", pathwise);
}

// ---------------------------------------------------------------------------
// sde-linear

struct LinearErrors {
  double Y = 0.0;
  double X = 0.0;
  double roundtrip = 0.0;
  double pathwise = 0.0;
};

LinearErrors linear_case(const Run& run, std::size_t n, std::size_t N, double H, std::ostream* paths,
                         std::ostream* trajectory) {
  const TimeGrid grid(run.cfg.T, n);
  const auto model = share(process::make_levy_model(H, grid));
  const double a = run.cfg.a, x0 = run.cfg.x0;
  const auto prob = sde::linear_problem(model, a, x0);
  sde::validate_problem(prob);
  struct Row {
    double WT, Y, Yc, X, Xc, rt, pw;
  };
  std::vector<Row> rows(N);
  parallel_for(N, run.cfg.threads, [&](std::size_t p) {
    const auto drv = process::make_driver(run.cfg.seed, static_cast<std::uint32_t>(p), grid);
    const auto sol = sde::solve_flow(prob, drv);
    const double WT = process::sample_path(*model, drv).at(n);
    Row r;
    r.WT = WT;
    r.Y = sol.Y[0];
    r.Yc = x0 * std::exp(-a * WT);
    r.X = sol.X[0];
    r.Xc = x0 * std::exp(a * WT);
    r.rt = sol.inversion_residual / (1.0 + std::abs(x0));
    r.pw = sde::pathwise_backward_Y(prob, drv, 0, n, prob.x0)[0];
    rows[p] = r;
  });
  if (trajectory) {
    const auto drv = process::make_driver(run.cfg.seed, 0, grid);
    sde::write_trajectory_csv(*trajectory, sde::solve_reversed_euler(prob, n, drv, prob.x0), grid);
  }
  LinearErrors e;
  if (paths) *paths << "path,W_T,Y,Y_closed,X,X_closed,Y_pathwise\n";
  for (std::size_t p = 0; p < N; ++p) {
    const Row& r = rows[p];
    e.Y += std::abs(r.Y - r.Yc) / std::abs(r.Yc) / static_cast<double>(N);
    e.X += std::abs(r.X - r.Xc) / std::abs(r.Xc) / static_cast<double>(N);
    e.pathwise += std::abs(r.pw - r.Yc) / std::abs(r.Yc) / static_cast<double>(N);
    e.roundtrip = std::max(e.roundtrip, r.rt);
    if (paths)
      *paths << p << ',' << fd(r.WT) << ',' << fd(r.Y) << ',' << fd(r.Yc) << ',' << fd(r.X) << ',' << fd(r.Xc) << ','
             << fd(r.pw) << "\n";
  }
  return e;
}

void run_sde_linear(Run& run) {
  const std::size_t n = run.n(512);
  const std::size_t N = run.N(200);
  const double H = run.H(0.75);
  const std::size_t n_coarse = 64;
  run.echo["n"] = n;
  run.echo["n_coarse"] = n_coarse;
  run.echo["N"] = N;
  run.echo["H"] = H;
  run.echo["a"] = run.cfg.a;
  run.echo["x0"] = run.cfg.x0;
  run.echo["model"] = "levy";

  LinearErrors fine, coarse;
  {
    auto paths = run.csv("paths.csv");
    auto traj = run.csv("trajectory.csv");
    fine = linear_case(run, n, N, H, &paths, &traj);
  }
  coarse = linear_case(run, n_coarse, N, H, nullptr, nullptr);
  run.rec.add("linear_Y_mean_rel_err", fine.Y);
  run.rec.add("linear_X_mean_rel_err", fine.X);
  run.rec.add("linear_X_err_ratio_n512_n64", fine.X / coarse.X);
  run.rec.add("inversion_roundtrip_rel", fine.roundtrip);
  {
    auto diag = run.csv("diagnostics.csv");
    diag << "quantity,n,value\n";
    diag << "Y_mean_rel_err," << n << ',' << fd(fine.Y) << "\n";
    diag << "Y_mean_rel_err," << n_coarse << ',' << fd(coarse.Y) << "\n";
    diag << "X_mean_rel_err," << n << ',' << fd(fine.X) << "\n";
    diag << "X_mean_rel_err," << n_coarse << ',' << fd(coarse.X) << "\n";
    diag << "pathwise_backward_Y_mean_rel_err," << n << ',' << fd(fine.pathwise) << "\n";
    diag << "pathwise_backward_Y_mean_rel_err," << n_coarse << ',' << fd(coarse.pathwise) << "\n";
  }

  // exact cases
  const TimeGrid grid(run.cfg.T, n);
  const auto model = share(process::make_levy_model(H, grid));
  const double a = run.cfg.a, x0 = run.cfg.x0;
  const auto zero = sde::zero_problem(model, x0);
  const auto add = sde::additive_problem(model, a, x0);
  sde::validate_problem(zero);
  sde::validate_problem(add);
  const std::size_t M = std::min<std::size_t>(N, 20);
  std::vector<double> ez(M), ey(M), ex(M);
  parallel_for(M, run.cfg.threads, [&](std::size_t p) {
    const auto drv = process::make_driver(run.cfg.seed, static_cast<std::uint32_t>(p), grid);
    const auto sz = sde::solve_flow(zero, drv);
    double e = std::max(std::abs(sz.Y[0] - x0), std::abs(sz.X[0] - x0));
    for (double z : sz.Z.Z) e = std::max(e, std::abs(z - x0));
    ez[p] = e;
    const double WT = process::sample_path(*model, drv).at(n);
    const auto sa = sde::solve_flow(add, drv);
    ey[p] = std::abs(sa.Y[0] - (x0 - a * WT));
    ex[p] = std::abs(sa.X[0] - (x0 + a * WT));
  });
  run.rec.add("zero_sigma_err", *std::max_element(ez.begin(), ez.end()));
  run.rec.add("additive_Y_err", *std::max_element(ey.begin(), ey.end()));
  run.rec.add("additive_X_err", *std::max_element(ex.begin(), ex.end()));
}

// ---------------------------------------------------------------------------
// sde-flow

double mean_flow_residual(const Run& run, std::size_t n, std::size_t N, double H, int kind, double* max_out) {
  const TimeGrid grid(run.cfg.T, n);
  const auto model = share(process::make_levy_model(H, grid));
  const double a = run.cfg.a, x0 = run.cfg.x0;
  const sde::SdeProblem prob = kind == 0   ? sde::zero_problem(model, x0)
                               : kind == 1 ? sde::additive_problem(model, a, x0)
                                           : sde::linear_problem(model, a, x0);
  std::vector<double> res(N);
  parallel_for(N, run.cfg.threads, [&](std::size_t p) {
    const auto drv = process::make_driver(run.cfg.seed, static_cast<std::uint32_t>(p), grid);
    res[p] = sde::check_flow_property(prob, drv, n / 4, n / 2, n, prob.x0);
  });
  if (max_out) *max_out = *std::max_element(res.begin(), res.end());
  return mean_of(res);
}

void run_sde_flow(Run& run) {
  const std::size_t n = run.n(512);
  const std::size_t N = run.N(100);
  const double H = run.H(0.75);
  const std::size_t n_coarse = 64;
  run.echo["n"] = n;
  run.echo["n_coarse"] = n_coarse;
  run.echo["N"] = N;
  run.echo["H"] = H;
  run.echo["a"] = run.cfg.a;
  run.echo["x0"] = run.cfg.x0;
  run.echo["model"] = "levy";
  run.echo["r_s_t"] = "T/4,T/2,T";

  auto out = run.csv("flow.csv");
  out << "case,n,mean_residual,max_residual\n";
  double mx = 0.0;
  const double lin_f = mean_flow_residual(run, n, N, H, 2, &mx);
  out << "linear," << n << ',' << fd(lin_f) << ',' << fd(mx) << "\n";
  const double lin_c = mean_flow_residual(run, n_coarse, N, H, 2, &mx);
  out << "linear," << n_coarse << ',' << fd(lin_c) << ',' << fd(mx) << "\n";
  const double add_f = mean_flow_residual(run, n, N, H, 1, &mx);
  out << "additive," << n << ',' << fd(add_f) << ',' << fd(mx) << "\n";
  const double add_max = mx;
  const double zero_f = mean_flow_residual(run, n, N, H, 0, &mx);
  out << "zero," << n << ',' << fd(zero_f) << ',' << fd(mx) << "\n";
  run.rec.add("linear_flow_residual_ratio_n512_n64", lin_f / lin_c);
  run.rec.add("additive_flow_residual", add_max);
  run.rec.add("zero_flow_residual", mx);

  // adaptedness and read audit on the linear problem
  const TimeGrid grid(run.cfg.T, n);
  const auto model = share(process::make_levy_model(H, grid));
  const auto prob = sde::linear_problem(model, run.cfg.a, run.cfg.x0);
  std::size_t mismatches = 0, future = 0;
  double min_change = std::numeric_limits<double>::infinity();
  auto aud = run.csv("adaptedness.csv");
  aud << "path,cut,prefix_identical,max_suffix_change,future_reads,total_reads\n";
  for (std::uint32_t p = 0; p < 5; ++p) {
    const auto drv = process::make_driver(run.cfg.seed, p, grid);
    for (std::size_t cut : {std::size_t{1}, n / 4, n / 2, n - 1}) {
      const auto a = sde::audit_adaptedness(prob, drv, n, cut, run.cfg.seed + 1 + p);
      if (!a.prefix_identical) ++mismatches;
      future += a.causality.future_reads;
      min_change = std::min(min_change, a.max_suffix_change);
      aud << p << ',' << cut << ',' << (a.prefix_identical ? 1 : 0) << ',' << fd(a.max_suffix_change) << ','
          << a.causality.future_reads << ',' << a.causality.total_reads << "\n";
    }
  }
  run.rec.add("adaptedness_prefix_mismatches", static_cast<double>(mismatches));
  run.rec.add("adaptedness_min_suffix_change", min_change);
  run.rec.add("causality_future_reads", static_cast<double>(future));
}

// ---------------------------------------------------------------------------
// holder

void run_holder(Run& run) {
  const std::size_t n = run.n(512);
  const std::size_t N = run.N(100);
  const double H = run.H(0.75);
  const std::size_t N_moments = 500;
  run.echo["n"] = n;
  run.echo["N"] = N;
  run.echo["N_moments"] = N_moments;
  run.echo["H"] = H;
  run.echo["a"] = run.cfg.a;
  run.echo["x0"] = run.cfg.x0;
  const TimeGrid grid(run.cfg.T, n);

  {
    auto out = run.csv("holder.csv");
    out << "H,mean_exponent,mean_exponent_unnormalized,mean_holder_norm\n";
    for (double h : {0.6, 0.75, 0.9}) {
      const auto model = process::make_stationary_model(h, grid);
      const double eta = process::holder_eta(h);
      std::vector<double> ex(N), raw(N), hn(N);
      parallel_for(N, run.cfg.threads, [&](std::size_t p) {
        const auto path = process::sample_path(model, process::make_driver(run.cfg.seed, static_cast<std::uint32_t>(p), grid));
        ex[p] = process::holder_exponent_estimate(path);
        raw[p] = process::holder_exponent_estimate(path, false);
        hn[p] = integ::holder_norm_estimate(path, eta);
      });
      const double m = mean_of(ex);
      out << fd(h) << ',' << fd(m) << ',' << fd(mean_of(raw)) << ',' << fd(mean_of(hn)) << "\n";
      run.rec.add("holder_exponent_err_H" + fd(h), std::abs(m - h));
    }
  }

  const auto model = share(process::make_levy_model(H, grid));
  const auto lin = sde::linear_problem(model, run.cfg.a, run.cfg.x0);
  sde::MomentConfig mc;
  mc.paths = N_moments;
  mc.seed = run.cfg.seed;
  mc.xs = {0.5, 1.0, 2.0};
  mc.threads = run.cfg.threads;
  const auto rep = sde::moment_and_continuity_report(lin, mc);
  run.echo["p"] = rep.p;
  run.echo["eta"] = rep.eta;
  {
    auto out = run.csv("moments.csv");
    out << "v,x,moment,se\n";
    for (const auto& r : rep.moments) out << fd(grid.node(r.v)) << ',' << fd(r.x) << ',' << fd(r.moment) << ',' << fd(r.se) << "\n";
  }
  {
    auto out = run.csv("increments.csv");
    out << "h,moment,se,fitted_exponent\n";
    for (const auto& r : rep.increments)
      out << fd(r.h) << ',' << fd(r.moment) << ',' << fd(r.se) << ',' << fd(rep.fitted_exponent) << "\n";
  }
  run.rec.add("linear_moment_exponent_margin", rep.fitted_exponent - (rep.eta - 0.15));

  const auto add = sde::additive_problem(model, run.cfg.a, run.cfg.x0);
  sde::MomentConfig ac;
  ac.paths = N_moments;
  ac.seed = run.cfg.seed;
  ac.p = 2.0;
  ac.threads = run.cfg.threads;
  ac.additive_oracle = true;
  const auto arep = sde::moment_and_continuity_report(add, ac);
  double dev = 0.0;
  auto out = run.csv("additive_increments.csv");
  out << "h,moment,se,oracle\n";
  for (const auto& r : arep.increments) {
    dev = std::max(dev, std::abs(r.moment - r.oracle) / r.se);
    out << fd(r.h) << ',' << fd(r.moment) << ',' << fd(r.se) << ',' << fd(r.oracle) << "\n";
  }
  run.rec.add("additive_increment_max_se_dev", dev);

  const auto zero = sde::zero_problem(model, run.cfg.x0);
  sde::MomentConfig zc;
  zc.paths = 20;
  zc.seed = run.cfg.seed;
  zc.xs = {0.5, 1.0, 2.0};
  zc.threads = run.cfg.threads;
  const auto zrep = sde::moment_and_continuity_report(zero, zc);
  double zerr = 0.0;
  for (const auto& r : zrep.moments) zerr = std::max(zerr, std::abs(r.moment - std::pow(std::abs(r.x), zrep.p)));
  run.rec.add("zero_moment_err", zerr);
}

// ---------------------------------------------------------------------------

ordered_json summary_json(const std::string& experiment, const ordered_json& echo, const ExperimentResult& res) {
  ordered_json j;
  j["experiment"] = experiment;
  j["config_echo"] = echo;
  ordered_json ms = ordered_json::array();
  for (const auto& m : res.metrics) {
    ordered_json o;
    o["name"] = m.name;
    o["value"] = number_or_string(m.value);
    o["threshold"] = number_or_string(m.threshold.value);
    o["relation"] = m.threshold.relation;
    o["pass"] = m.pass;
    ms.push_back(o);
  }
  j["metrics"] = ms;
  if (!res.error.empty()) j["error"] = res.error;
  j["pass"] = res.pass;
  return j;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << s;
}

ExperimentResult run_single(const ExperimentConfig& cfg, const std::string& name, std::ostream& log) {
  Run run{cfg, fs::path(cfg.outdir) / name, Recorder(cfg), ordered_json::object(), log};
  fs::create_directories(run.dir);
  run.echo["seed"] = cfg.seed;
  run.echo["T"] = cfg.T;

  static const std::map<std::string, std::function<void(Run&)>> table = {
      {"ops-selftest", run_ops_selftest}, {"causality", run_causality},
      {"fbm-cov", run_fbm_cov},           {"trace-term", run_trace_term},
      {"strato-chainrule", run_strato},   {"reversal-identity", run_reversal_identity},
      {"sde-linear", run_sde_linear},     {"sde-flow", run_sde_flow},
      {"holder", run_holder},
  };
  ExperimentResult res;
  res.experiment = name;
  try {
    table.at(name)(run);
  } catch (const std::exception& e) {
    res.error = e.what();
  }
  res.metrics = run.rec.metrics;
  res.pass = res.error.empty() && !res.metrics.empty() &&
             std::all_of(res.metrics.begin(), res.metrics.end(), [](const Metric& m) { return m.pass; });
  write_text(run.dir / "summary.json", summary_json(name, run.echo, res).dump(2) + "\n");

  log << name << ": " << (res.pass ? "pass" : "FAIL") << "\n";
  for (const auto& m : res.metrics)
    if (!m.pass)
      log << "  failing metric " << m.name << " = " << fd(m.value) << " (need " << m.threshold.relation << ' '
          << fd(m.threshold.value) << ")\n";
  if (!res.error.empty()) log << "  error: " << res.error << "\n";
  return res;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  validate_config(cfg);
  if (cfg.experiment != "report-all") return run_single(cfg, cfg.experiment, log);

  ExperimentResult all;
  all.experiment = "report-all";
  all.pass = true;
  ordered_json echo;
  echo["seed"] = cfg.seed;
  echo["T"] = cfg.T;
  ordered_json parts = ordered_json::array();
  for (const auto& name : experiment_names()) {
    if (name == "report-all") continue;
    ExperimentConfig sub = cfg;
    sub.experiment = name;
    const auto r = run_single(sub, name, log);
    for (auto m : r.metrics) {
      m.name = name + "/" + m.name;
      all.metrics.push_back(m);
    }
    if (!r.error.empty()) all.error += name + ": " + r.error + "; ";
    all.pass = all.pass && r.pass;
    parts.push_back(name);
  }
  echo["experiments"] = parts;
  const fs::path dir = fs::path(cfg.outdir) / "report-all";
  fs::create_directories(dir);
  write_text(dir / "summary.json", summary_json("report-all", echo, all).dump(2) + "\n");
  log << "report-all: " << (all.pass ? "pass" : "FAIL") << "\n";
  return all;
}

int run(const ExperimentConfig& cfg, std::ostream& log) {
  try {
    return run_experiment(cfg, log).pass ? 0 : 1;
  } catch (const UsageError& e) {
    log << "usage error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace volterra::exp

#include "volterra/volterra_process.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "volterra/format.hpp"
#include "volterra/rng.hpp"

namespace volterra::process {

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Levy: return "levy";
    case ModelKind::StationaryFbm: return "stationary";
    case ModelKind::Multifractional: return "multifractional";
    case ModelKind::Custom: return "custom";
  }
  return "unknown";
}

double integrability_p(double H) {
  if (!(H > 0.5 && H < 1.0)) throw std::invalid_argument("integrability_p: H must lie in (1/2,1)");
  // H - 1/2 is inexact in binary (0.7 - 0.5 < 0.2), so exact quotients come out
  // a few ulps high; ceil would then skip to the next integer
  const double q = 2.0 / (H - 0.5);
  return std::ceil(q - 1e-9 * q) + 2.0;
}

double holder_eta(double H) { return H - 0.5 - 1.0 / integrability_p(H); }

double stationary_fbm_variance_constant(double H) {
  if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("stationary_fbm_variance_constant: H in (0,1)");
  if (H == 0.5) return 1.0;
  return std::tgamma(2.0 - 2.0 * H) * std::cos(std::numbers::pi * H) /
         (std::numbers::pi * H * (1.0 - 2.0 * H));
}

ops::DiscreteOperator build_levy_operator(double H, const TimeGrid& grid) {
  if (!(H > 0.5 && H < 1.0)) throw std::invalid_argument("build_levy_operator: H must lie in (1/2,1)");
  return frac::right_frac_operator(H - 0.5, grid);
}

Matrix KH_indicator_table(double H, const TimeGrid& grid, std::size_t refinement) {
  if (!(H > 0.5 && H < 1.0)) throw std::invalid_argument("KH_indicator_table: H must lie in (1/2,1)");
  if (refinement == 0) throw std::invalid_argument("KH_indicator_table: refinement must be positive");
  const std::size_t n = grid.n;
  const std::size_t m = refinement;
  const std::size_t nf = n * m;
  const double g = H - 0.5;
  const double df = grid.T / static_cast<double>(nf);

  // fine product-integration weights and inner multiplier x^g at fine midpoints
  std::vector<double> w(nf), inner(nf);
  const double scale = std::pow(df, g) / std::tgamma(g + 1.0);
  for (std::size_t k = 0; k < nf; ++k) {
    const double kk = static_cast<double>(k);
    w[k] = scale * (std::pow(kk + 1.0, g) - std::pow(kk, g));
    inner[k] = std::pow((kk + 0.5) * df, g);
  }

  Matrix G(n + 1, n);
  for (std::size_t j = 0; j < n; ++j) {
    // the last fine cell of coarse cell j; the right integral reads at its right end
    const std::size_t c = m * (j + 1) - 1;
    const double outer = std::pow(grid.node(j + 1), -g);
    double running = 0.0;
    for (std::size_t cp = c + 1; cp < nf; ++cp) {
      running += w[cp - c - 1] * inner[cp];
      if ((cp + 1) % m == 0) G((cp + 1) / m, j) = outer * running;
    }
  }
  return G;
}

ops::DiscreteOperator build_KH_operator(double H, const TimeGrid& grid, std::size_t refinement) {
  return operator_from_indicator_table(KH_indicator_table(H, grid, refinement), grid);
}

Matrix multifractional_indicator_table(const frac::HurstSpec& spec, const TimeGrid& grid) {
  spec.validate(grid);
  const std::size_t n = grid.n;
  Matrix G(n + 1, n);
  for (std::size_t i = 2; i <= n; ++i) {
    const double t = grid.node(i);
    const double h = spec.at(t);
    // j = i-1 reads the kernel on the diagonal, which vanishes
    for (std::size_t j = 0; j + 1 < i; ++j) G(i, j) = frac::kernel_KH(h, t, grid.node(j + 1));
  }
  return G;
}

ops::DiscreteOperator build_multifractional_operator(const frac::HurstSpec& spec, const TimeGrid& grid) {
  return operator_from_indicator_table(multifractional_indicator_table(spec, grid), grid);
}

Matrix indicator_column_table(const ops::DiscreteOperator& V) {
  const std::size_t n = V.grid.n;
  Matrix G(n + 1, n);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 0; j < n; ++j) G(i, j) = G(i - 1, j) + V.M(j, i - 1);
  return G;
}

ops::DiscreteOperator operator_from_indicator_table(const Matrix& G, const TimeGrid& grid) {
  const std::size_t n = grid.n;
  if (G.rows() != n + 1 || G.cols() != n)
    throw std::invalid_argument("operator_from_indicator_table: table must be (n+1) x n");
  Matrix M(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j) M(j, k) = G(k + 1, j) - G(k, j);
  ops::DiscreteOperator V(grid, std::move(M));
  const auto rev = ops::is_causal(V, ops::Resolution::Reversed);
  V.causal_reversed = rev.causal ? ops::Tri::yes : ops::Tri::no;
  V.causal_forward = ops::is_causal(V, ops::Resolution::Forward).causal ? ops::Tri::yes : ops::Tri::no;
  return V;
}

namespace {

VolterraModel finish_model(ModelKind kind, frac::HurstSpec hurst, const TimeGrid& grid, ops::DiscreteOperator V,
                           double H_for_p) {
  VolterraModel m;
  m.kind = kind;
  m.hurst = std::move(hurst);
  m.grid = grid;
  m.V = std::move(V);
  m.Vcheck = ops::reversed_operator(m.V);
  m.G = indicator_column_table(m.V);
  m.p = integrability_p(H_for_p);
  m.eta = holder_eta(H_for_p);
  return m;
}

}  // namespace

VolterraModel make_levy_model(double H, const TimeGrid& grid) {
  return finish_model(ModelKind::Levy, frac::HurstSpec::constant(H), grid, build_levy_operator(H, grid), H);
}

VolterraModel make_stationary_model(double H, const TimeGrid& grid, std::size_t refinement) {
  Matrix G = KH_indicator_table(H, grid, refinement);
  VolterraModel m = finish_model(ModelKind::StationaryFbm, frac::HurstSpec::constant(H), grid,
                                 operator_from_indicator_table(G, grid), H);
  m.G = std::move(G);  // keep the table as built rather than its prefix-sum reconstruction
  return m;
}

VolterraModel make_multifractional_model(const frac::HurstSpec& spec, const TimeGrid& grid) {
  Matrix G = multifractional_indicator_table(spec, grid);
  double inf = 1.0;
  for (std::size_t k = 0; k <= grid.n; ++k) inf = std::min(inf, spec.at(grid.node(k)));
  VolterraModel m = finish_model(ModelKind::Multifractional, spec, grid, operator_from_indicator_table(G, grid), inf);
  m.G = std::move(G);
  return m;
}

VolterraModel make_custom_model(const ops::DiscreteOperator& V, double H) {
  return finish_model(ModelKind::Custom, frac::HurstSpec::constant(H), V.grid, V, H);
}

Matrix covariance_gram(const VolterraModel& model) {
  const Matrix& G = model.G;
  const std::size_t n1 = G.rows();
  const double dt = model.grid.dt();
  Matrix C(n1, n1);
  for (std::size_t i = 0; i < n1; ++i) {
    auto gi = G.row(i);
    for (std::size_t k = 0; k <= i; ++k) {
      auto gk = G.row(k);
      double s = 0.0;
      for (std::size_t j = 0; j < G.cols(); ++j) s += gi[j] * gk[j];
      C(i, k) = C(k, i) = dt * s;
    }
  }
  return C;
}

NodePath BrownianDriver::cumulative() const {
  NodePath B(grid, dim);
  for (std::size_t j = 0; j < grid.n; ++j)
    for (std::size_t c = 0; c < dim; ++c) B.at(j + 1, c) = B.at(j, c) + inc(j, c);
  return B;
}

BrownianDriver make_driver(std::uint64_t seed, std::uint32_t stream, const TimeGrid& grid, std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("make_driver: dim must be positive");
  BrownianDriver d;
  d.seed = seed;
  d.stream = stream;
  d.grid = grid;
  d.dim = dim;
  d.increments.resize(grid.n * dim);
  const double sd = std::sqrt(grid.dt());
  for (std::size_t j = 0; j < grid.n; ++j)
    for (std::size_t c = 0; c < dim; ++c)
      d.increments[j * dim + c] = sd * rng::standard_normal(seed, stream, j, static_cast<std::uint32_t>(c));
  return d;
}

BrownianDriver reversed_driver(const BrownianDriver& d) {
  BrownianDriver r = d;
  r.reversed = !d.reversed;
  const std::size_t n = d.grid.n;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t c = 0; c < d.dim; ++c) r.increments[j * d.dim + c] = d.inc(n - 1 - j, c);
  return r;
}

NodePath sample_path(const Matrix& G, const BrownianDriver& driver) {
  const std::size_t n = driver.grid.n;
  if (G.rows() != n + 1 || G.cols() != n) throw std::invalid_argument("sample_path: table/grid mismatch");
  NodePath W(driver.grid, driver.dim);
  for (std::size_t i = 1; i <= n; ++i) {
    auto gi = G.row(i);
    for (std::size_t c = 0; c < driver.dim; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += gi[j] * driver.increments[j * driver.dim + c];
      W.at(i, c) = s;
    }
  }
  return W;
}

NodePath sample_path(const VolterraModel& model, const BrownianDriver& driver) {
  if (!(model.grid == driver.grid)) throw std::invalid_argument("sample_path: grid mismatch");
  return sample_path(model.G, driver);
}

double holder_exponent_estimate(const NodePath& path, bool normalize) {
  const std::size_t n = path.grid.n;
  std::vector<double> xs, ys;
  for (std::size_t h = 1; 4 * h <= n; h *= 2) {
    double mx = 0.0;
    for (std::size_t i = 0; i + h <= n; ++i)
      for (std::size_t c = 0; c < path.dim; ++c) mx = std::max(mx, std::abs(path.at(i + h, c) - path.at(i, c)));
    if (mx <= 0.0) continue;
    xs.push_back(std::log(static_cast<double>(h) * path.grid.dt()));
    // a max over about n/h independent windows grows like sqrt(2 log(n/h))
    if (normalize) mx /= std::sqrt(2.0 * std::log(static_cast<double>(n) / static_cast<double>(h)));
    ys.push_back(std::log(mx));
  }
  if (xs.size() < 2) throw std::invalid_argument("holder_exponent_estimate: path too short or constant");
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  return sxy / sxx;
}

void write_path_csv(std::ostream& os, const NodePath& path) {
  os << "t";
  for (std::size_t c = 0; c < path.dim; ++c) os << ",component_" << c;
  os << "\n";
  for (std::size_t k = 0; k <= path.grid.n; ++k) {
    os << format_double(path.grid.node(k));
    for (std::size_t c = 0; c < path.dim; ++c) os << ',' << format_double(path.at(k, c));
    os << "\n";
  }
}

void write_gram_csv(std::ostream& os, const Matrix& C, double H) {
  os << "# H=" << format_double(H) << " n=" << (C.rows() - 1) << "\n";
  for (std::size_t i = 0; i < C.rows(); ++i) {
    for (std::size_t k = 0; k < C.cols(); ++k) {
      if (k) os << ',';
      os << format_double(C(i, k));
    }
    os << "\n";
  }
}

}  // namespace volterra::process

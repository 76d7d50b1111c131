#include "volterra/fractional_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace volterra::frac {

namespace {

constexpr std::size_t kSeriesCap = 1000000;

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

double rgamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  return 1.0 / std::tgamma(x);
}

// Plain power series, w in [0,1).
double series_2f1(double a, double b, double c, double w, std::size_t& terms) {
  double sum = 1.0;
  double term = 1.0;
  const double settle = std::abs(a) + std::abs(b) + std::abs(c);
  std::size_t quiet = 0;
  for (std::size_t k = 0; k < kSeriesCap; ++k) {
    const double kk = static_cast<double>(k);
    term *= (a + kk) * (b + kk) / ((c + kk) * (kk + 1.0)) * w;
    sum += term;
    ++terms;
    if (term == 0.0) return sum;  // terminating series
    if (kk > settle && std::abs(term) <= 1e-17 * std::abs(sum)) {
      if (++quiet >= 3) return sum;
    } else {
      quiet = 0;
    }
  }
  std::ostringstream msg;
  msg << "gauss_2f1: series did not converge after " << kSeriesCap << " terms (a=" << a << ", b=" << b
      << ", c=" << c << ", w=" << w << ", partial=" << sum << ")";
  throw std::runtime_error(msg.str());
}

// Argument w in [0,1).
double eval_unit(double a, double b, double c, double w, Hyp2F1Result& r) {
  const double s = c - a - b;
  const bool terminating = is_nonpositive_integer(a) || is_nonpositive_integer(b);
  const bool connection_ok = w > 0.5 && !terminating && std::abs(s - std::round(s)) > 0.02;
  if (!connection_ok) return series_2f1(a, b, c, w, r.terms);
  // Gauss connection to the neighbourhood of 1.
  r.connection = true;
  const double gc = std::tgamma(c);
  const double A1 = gc * std::tgamma(s) * rgamma(c - a) * rgamma(c - b);
  const double A2 = gc * std::tgamma(-s) * rgamma(a) * rgamma(b);
  const double v = 1.0 - w;
  double f1 = 0.0, f2 = 0.0;
  if (A1 != 0.0) f1 = series_2f1(a, b, 1.0 - s, v, r.terms);
  if (A2 != 0.0) f2 = series_2f1(c - a, c - b, 1.0 + s, v, r.terms);
  return A1 * f1 + std::pow(v, s) * A2 * f2;
}

}  // namespace

HurstSpec HurstSpec::constant(double H) {
  HurstSpec s;
  s.varying = false;
  s.H0 = H;
  return s;
}

HurstSpec HurstSpec::varying_fn(std::function<double(double)> fn, double eta_H) {
  HurstSpec s;
  s.varying = true;
  s.H = std::move(fn);
  s.eta_H = eta_H;
  return s;
}

void HurstSpec::validate(const TimeGrid& grid) const {
  if (!varying) {
    if (!(H0 > 0.5 && H0 < 1.0)) throw std::invalid_argument("HurstSpec: constant H must lie in (1/2,1)");
    return;
  }
  if (!H) throw std::invalid_argument("HurstSpec: varying spec needs a function");
  if (!(eta_H > 0.5)) throw std::invalid_argument("HurstSpec: eta_H must exceed 1/2");
  double inf = 1.0;
  for (std::size_t k = 0; k <= grid.n; ++k) {
    const double h = H(grid.node(k));
    if (!(h < 1.0)) throw std::invalid_argument("HurstSpec: H(t) must stay below 1");
    inf = std::min(inf, h);
  }
  if (!(inf > eta_H)) throw std::invalid_argument("HurstSpec: need inf H(t) > eta_H");
}

double gamma_fn(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("gamma_fn: argument must be positive");
  return std::tgamma(x);
}

Hyp2F1Result gauss_2f1_detailed(double a, double b, double c, double z) {
  if (is_nonpositive_integer(c)) throw std::domain_error("gauss_2f1: c is a non-positive integer");
  if (!(z < 1.0) || !std::isfinite(z)) throw std::domain_error("gauss_2f1: need z < 1");
  Hyp2F1Result r;
  if (z == 0.0 || a == 0.0 || b == 0.0) {
    r.value = 1.0;
    return r;
  }
  if (z < 0.0) {
    // Pfaff: F(a,b;c;z) = (1-z)^{-a} F(a,c-b;c;z/(z-1)), new argument in (0,1).
    r.pfaff = true;
    const double w = z / (z - 1.0);
    r.value = std::pow(1.0 - z, -a) * eval_unit(a, c - b, c, w, r);
    return r;
  }
  r.value = eval_unit(a, b, c, z, r);
  return r;
}

double gauss_2f1(double a, double b, double c, double z) { return gauss_2f1_detailed(a, b, c, z).value; }

std::vector<double> gauss_2f1_series_terms(double a, double b, double c, double w, std::size_t count) {
  std::vector<double> t;
  t.reserve(count);
  double term = 1.0;
  t.push_back(term);
  for (std::size_t k = 0; k + 1 < count; ++k) {
    const double kk = static_cast<double>(k);
    term *= (a + kk) * (b + kk) / ((c + kk) * (kk + 1.0)) * w;
    t.push_back(term);
  }
  return t;
}

double kernel_levy(double H, double t, double r) {
  if (!(H > 0.5 && H < 1.0)) throw std::invalid_argument("kernel_levy: H must lie in (1/2,1)");
  if (r < 0.0 || t < 0.0) throw std::domain_error("kernel_levy: negative time");
  if (!(r < t)) return 0.0;
  return std::pow(t - r, H - 0.5) / std::tgamma(H + 0.5);
}

double kernel_KH(double H, double t, double r) {
  if (!(H >= 0.5 && H < 1.0)) throw std::invalid_argument("kernel_KH: H must lie in [1/2,1)");
  if (!(r < t)) return 0.0;
  if (!(r > 0.0)) throw std::domain_error("kernel_KH: r must be positive (singular at 0)");
  const double g = H - 0.5;
  return std::pow(t - r, g) / std::tgamma(H + 0.5) * gauss_2f1(0.5 - H, g, H + 0.5, 1.0 - t / r);
}

Matrix left_frac_matrix(double gamma, const TimeGrid& grid) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("left_frac_matrix: order must lie in [0,1]");
  const std::size_t n = grid.n;
  if (gamma == 0.0) return Matrix::identity(n);
  // w_k = dt^g/Gamma(g+1) ((k+1)^g - k^g), entry (i,j) = w_{i-j-1} for j < i
  std::vector<double> w(n);
  const double scale = std::pow(grid.dt(), gamma) / std::tgamma(gamma + 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k);
    w[k] = scale * (std::pow(kk + 1.0, gamma) - std::pow(kk, gamma));
  }
  Matrix L(n, n);
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) L(i, j) = w[i - j - 1];
  return L;
}

Matrix right_frac_matrix(double gamma, const TimeGrid& grid) { return transpose(left_frac_matrix(gamma, grid)); }

ops::DiscreteOperator left_frac_operator(double gamma, const TimeGrid& grid) {
  ops::DiscreteOperator op(grid, left_frac_matrix(gamma, grid));
  op.causal_forward = ops::Tri::yes;
  op.causal_reversed = gamma == 0.0 ? ops::Tri::yes : ops::Tri::no;
  return op;
}

ops::DiscreteOperator right_frac_operator(double gamma, const TimeGrid& grid) {
  return ops::adjoint(left_frac_operator(gamma, grid));
}

GridFunction left_frac_integral(double gamma, const GridFunction& f) {
  return left_frac_operator(gamma, f.grid).apply(f);
}

GridFunction right_frac_integral(double gamma, const GridFunction& f) {
  return right_frac_operator(gamma, f.grid).apply(f);
}

NodePath left_frac_integral_nodes(double gamma, const GridFunction& f) {
  const TimeGrid& g = f.grid;
  NodePath out(g, f.dim);
  if (gamma == 0.0) {
    // identity on cells; node k carries cell k, the last node repeats the last cell
    for (std::size_t k = 0; k <= g.n; ++k)
      for (std::size_t c = 0; c < f.dim; ++c) out.at(k, c) = f.at(std::min(k, g.n - 1), c);
    return out;
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("left_frac_integral_nodes: order must lie in [0,1]");
  const double scale = std::pow(g.dt(), gamma) / std::tgamma(gamma + 1.0);
  std::vector<double> w(g.n);
  for (std::size_t k = 0; k < g.n; ++k) {
    const double kk = static_cast<double>(k);
    w[k] = scale * (std::pow(kk + 1.0, gamma) - std::pow(kk, gamma));
  }
  for (std::size_t k = 1; k <= g.n; ++k)
    for (std::size_t c = 0; c < f.dim; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) s += w[k - j - 1] * f.at(j, c);
      out.at(k, c) = s;
    }
  return out;
}

ops::DiscreteOperator weighted_multiplier(const std::function<double(double)>& w, const TimeGrid& grid,
                                          WeightSampling at) {
  Matrix D(grid.n, grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double x = at == WeightSampling::CellMid ? grid.cell_mid(j) : grid.cell_left(j);
    const double v = w(x);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "weighted_multiplier: non-finite weight at x=" << x;
      throw std::domain_error(msg.str());
    }
    D(j, j) = v;
  }
  ops::DiscreteOperator op(grid, std::move(D));
  op.causal_forward = ops::Tri::yes;
  op.causal_reversed = ops::Tri::yes;
  return op;
}

}  // namespace volterra::frac

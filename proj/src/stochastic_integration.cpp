#include "volterra/stochastic_integration.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "volterra/format.hpp"

namespace volterra::integ {

CylindricalProcess CylindricalProcess::of_driver(const TimeGrid& grid, std::function<double(double)> g,
                                                 std::function<double(double)> gprime, Sampling s) {
  CylindricalProcess u;
  u.grid = grid;
  u.base = BaseKind::OfDriver;
  u.g = std::move(g);
  u.gprime = std::move(gprime);
  u.sampling = s;
  return u;
}

CylindricalProcess CylindricalProcess::of_volterra(const TimeGrid& grid, std::function<double(double)> g,
                                                   std::function<double(double)> gprime, Sampling s) {
  CylindricalProcess u = of_driver(grid, std::move(g), std::move(gprime), s);
  u.base = BaseKind::OfVolterra;
  return u;
}

CylindricalProcess CylindricalProcess::deterministic(const TimeGrid& grid, std::vector<double> values) {
  if (values.size() != grid.n) throw std::invalid_argument("CylindricalProcess: need one value per cell");
  CylindricalProcess u;
  u.grid = grid;
  u.base = BaseKind::Deterministic;
  u.values = std::move(values);
  return u;
}

void CylindricalProcess::validate(double rel_tol) const {
  if (base == BaseKind::Deterministic) return;
  if (!g || !gprime) throw std::invalid_argument("CylindricalProcess: g and g' are required");
  for (int k = 0; k < 10; ++k) {
    const double x = -2.0 + 4.0 * (k + 0.37) / 10.0;
    const double h = 1e-5 * std::max(1.0, std::abs(x));
    const double fd = (g(x + h) - g(x - h)) / (2.0 * h);
    const double an = gprime(x);
    const double err = std::abs(fd - an) / std::max(1.0, std::abs(an));
    if (err > rel_tol) {
      std::ostringstream msg;
      msg << "CylindricalProcess: g' disagrees with finite differences at x=" << x << " (rel err " << err << ")";
      throw std::invalid_argument(msg.str());
    }
  }
}

PathContext make_context(const process::BrownianDriver& driver, const Matrix* G) {
  if (driver.dim != 1) throw std::invalid_argument("make_context: scalar drivers only");
  PathContext ctx;
  ctx.grid = driver.grid;
  ctx.dB = driver.increments;
  ctx.B = driver.cumulative();
  ctx.G = G;
  if (G) ctx.W = process::sample_path(*G, driver);
  return ctx;
}

namespace {

const NodePath& base_path(const CylindricalProcess& u, const PathContext& ctx) {
  if (!(u.grid == ctx.grid)) throw std::invalid_argument("cylindrical process: grid mismatch");
  if (u.base == BaseKind::OfVolterra) {
    if (!ctx.G) throw std::invalid_argument("cylindrical process: Volterra base needs an indicator table");
    return ctx.W;
  }
  return ctx.B;
}

// derivative of the base path value at node k with respect to dB_j
double base_sensitivity(const CylindricalProcess& u, const PathContext& ctx, std::size_t k, std::size_t j) {
  if (u.base == BaseKind::OfVolterra) return (*ctx.G)(k, j);
  return j < k ? 1.0 : 0.0;
}

}  // namespace

std::vector<double> cell_values(const CylindricalProcess& u, const PathContext& ctx) {
  const std::size_t n = ctx.grid.n;
  if (u.base == BaseKind::Deterministic) return u.values;
  const NodePath& b = base_path(u, ctx);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (u.sampling) {
      case Sampling::Left: out[i] = u.g(b.at(i)); break;
      case Sampling::Right: out[i] = u.g(b.at(i + 1)); break;
      case Sampling::Trapezoid: out[i] = 0.5 * (u.g(b.at(i)) + u.g(b.at(i + 1))); break;
    }
  }
  return out;
}

Matrix gradient_matrix(const CylindricalProcess& u, const PathContext& ctx) {
  const std::size_t n = ctx.grid.n;
  Matrix A(n, n);
  if (u.base == BaseKind::Deterministic) return A;
  const NodePath& b = base_path(u, ctx);
  for (std::size_t i = 0; i < n; ++i) {
    double wl = 0.0, wr = 0.0;  // weights of the node values t_i and t_{i+1}
    switch (u.sampling) {
      case Sampling::Left: wl = u.gprime(b.at(i)); break;
      case Sampling::Right: wr = u.gprime(b.at(i + 1)); break;
      case Sampling::Trapezoid:
        wl = 0.5 * u.gprime(b.at(i));
        wr = 0.5 * u.gprime(b.at(i + 1));
        break;
    }
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0.0;
      if (wl != 0.0) v += wl * base_sensitivity(u, ctx, i, j);
      if (wr != 0.0) v += wr * base_sensitivity(u, ctx, i + 1, j);
      A(j, i) = v;
    }
  }
  return A;
}

TraceTerm trace_term(const Matrix& A, const ops::DiscreteOperator& V, bool with_composition) {
  const std::size_t n = V.grid.n;
  if (A.rows() != n || A.cols() != n) throw std::invalid_argument("trace_term: gradient shape mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (V.M(i, i) != 0.0)
      throw std::invalid_argument("trace_term: operator has a non-zero diagonal; the trace is undefined");
  TraceTerm tt;
  tt.density.resize(n);
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    // V applied along s to the gradient row of r_j, read at cell j
    auto mj = V.M.row(j);
    auto aj = A.row(j);
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) d += mj[i] * aj[i];
    tt.density[j] = d;
    s += d;
  }
  const double dt = V.grid.dt();
  tt.total = dt * s;
  if (with_composition) tt.composition_trace = dt * volterra::trace(multiply(V.M, transpose(A)));
  return tt;
}

double skorokhod_step_integral(const std::vector<std::size_t>& partition, const std::vector<StepCoefficient>& F,
                               std::span<const double> dB, double dt) {
  if (partition.size() < 2 || F.size() + 1 != partition.size())
    throw std::invalid_argument("skorokhod_step_integral: one coefficient per block required");
  if (partition.back() > dB.size()) throw std::invalid_argument("skorokhod_step_integral: partition exceeds grid");
  double wiener = 0.0, correction = 0.0;
  for (std::size_t b = 0; b + 1 < partition.size(); ++b) {
    const std::size_t a = partition[b], e = partition[b + 1];
    if (!F[b].block_gradient.empty() && F[b].block_gradient.size() != e - a)
      throw std::invalid_argument("skorokhod_step_integral: block gradient length mismatch");
    double inc = 0.0;
    for (std::size_t k = a; k < e; ++k) inc += dB[k];
    wiener += F[b].value * inc;
    for (double gj : F[b].block_gradient) correction += gj;
  }
  return wiener - dt * correction;
}

namespace {

struct BlockPieces {
  std::vector<StepCoefficient> coeffs;
  double double_integral = 0.0;
};

// Block averages of V u and their in-block gradients, plus the block double
// integral of V(grad_r u)(s). Both use c_b(l) = sum_{k in b} M(k,l), so the cost
// is O(n^2) per partition.
BlockPieces block_pieces(const ops::DiscreteOperator& V, std::span<const double> Vu, const Matrix& A,
                         const std::vector<std::size_t>& partition) {
  const std::size_t n = V.grid.n;
  const double dt = V.grid.dt();
  BlockPieces out;
  std::vector<double> c(n);
  for (std::size_t b = 0; b + 1 < partition.size(); ++b) {
    const std::size_t a = partition[b], e = partition[b + 1];
    const double len = static_cast<double>(e - a);
    const double theta = len * dt;
    std::fill(c.begin(), c.end(), 0.0);
    double avg = 0.0;
    for (std::size_t k = a; k < e; ++k) {
      avg += Vu[k];
      auto mk = V.M.row(k);
      for (std::size_t l = 0; l < n; ++l) c[l] += mk[l];
    }
    StepCoefficient F;
    F.value = avg / len;
    F.block_gradient.resize(e - a);
    double inner = 0.0;
    for (std::size_t j = a; j < e; ++j) {
      auto aj = A.row(j);
      double s = 0.0;
      for (std::size_t l = 0; l < n; ++l) s += aj[l] * c[l];
      F.block_gradient[j - a] = s / len;  // (dt/theta) sum_{k in b} P(j,k)
      inner += s;                         // sum_{j,k in b} P(j,k)
    }
    out.double_integral += inner * dt * dt / theta;
    out.coeffs.push_back(std::move(F));
  }
  return out;
}

}  // namespace

double stratonovich_sum(const ops::DiscreteOperator& V, std::span<const double> u, const Matrix& A,
                        std::span<const double> dB, const std::vector<std::size_t>& partition) {
  const std::vector<double> Vu = V.apply(u);
  BlockPieces bp = block_pieces(V, Vu, A, partition);
  return skorokhod_step_integral(partition, bp.coeffs, dB, V.grid.dt()) + bp.double_integral;
}

StratonovichResult stratonovich_integral(const CylindricalProcess& u, const ops::DiscreteOperator& V,
                                         const PathContext& ctx, std::size_t coarsest_blocks) {
  if (!(u.grid == V.grid) || !(ctx.grid == V.grid)) throw std::invalid_argument("stratonovich_integral: grid mismatch");
  const std::size_t n = V.grid.n;
  const double dt = V.grid.dt();
  const std::vector<double> uv = cell_values(u, ctx);
  const Matrix A = gradient_matrix(u, ctx);
  const std::vector<double> Vu = V.apply(uv);

  StratonovichResult res;
  // delta(V u) on single cells: coefficient (V u)_k, in-cell gradient sum_l M(k,l) A(k,l)
  std::vector<std::size_t> finest(n + 1);
  for (std::size_t k = 0; k <= n; ++k) finest[k] = k;
  std::vector<StepCoefficient> cells(n);
  for (std::size_t k = 0; k < n; ++k) {
    cells[k].value = Vu[k];
    auto mk = V.M.row(k);
    auto ak = A.row(k);
    double s = 0.0;
    for (std::size_t l = 0; l < n; ++l) s += mk[l] * ak[l];
    cells[k].block_gradient = {s};
  }
  res.divergence = skorokhod_step_integral(finest, cells, ctx.dB, dt);
  res.trace = trace_term(A, V, false).total;
  res.reference = res.divergence + res.trace;

  for (std::size_t blocks = std::min(coarsest_blocks, n);; blocks *= 2) {
    blocks = std::min(blocks, n);
    const auto part = ops::dyadic_partition(V.grid, blocks);
    BlockPieces bp = block_pieces(V, Vu, A, part);
    RefinementRow row;
    row.mesh = V.grid.T / static_cast<double>(blocks);
    row.R_pi = skorokhod_step_integral(part, bp.coeffs, ctx.dB, dt) + bp.double_integral;
    row.reference = res.reference;
    row.abs_err = std::abs(row.R_pi - row.reference);
    res.table.push_back(row);
    if (blocks >= n) break;
  }
  return res;
}

ReversalIdentity verify_reversal_identity(const process::VolterraModel& model, std::size_t r, std::size_t t,
                                          std::span<const double> u,
                                          const std::vector<process::BrownianDriver>& drivers) {
  const TimeGrid& grid = model.grid;
  const std::size_t n = grid.n;
  if (r > t || t > n) throw std::invalid_argument("verify_reversal_identity: need r <= t <= n");
  if (u.size() != n) throw std::invalid_argument("verify_reversal_identity: one value per cell");

  using ops::Resolution;
  GridFunction uf(grid, std::vector<double>(u.begin(), u.end()));

  // left side: V (e_{T-r} - e_{T-t}) tau u
  const auto e_hi = ops::projection_at(Resolution::Forward, n - r, grid);
  const auto e_lo = ops::projection_at(Resolution::Forward, n - t, grid);
  const ops::DiscreteOperator window_lhs(grid, subtract(e_hi.M, e_lo.M));
  const GridFunction lhs = model.V.apply(window_lhs.apply(ops::reverse(uf)));

  // right side: Vcheck (1_{[r,t]} u), a deterministic integrand is invariant under Theta
  const auto e_t = ops::projection_at(Resolution::Forward, t, grid);
  const auto e_r = ops::projection_at(Resolution::Forward, r, grid);
  const ops::DiscreteOperator window_rhs(grid, subtract(e_t.M, e_r.M));
  const GridFunction rhs = model.Vcheck.apply(window_rhs.apply(uf));

  ReversalIdentity out;
  out.lhs = lhs.values;
  out.rhs_mirrored.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.rhs_mirrored[j] = rhs.values[n - 1 - j];
    out.max_coef_discrepancy = std::max(out.max_coef_discrepancy, std::abs(out.lhs[j] - out.rhs_mirrored[j]));
  }
  for (const auto& d : drivers) {
    if (!(d.grid == grid) || d.dim != 1) throw std::invalid_argument("verify_reversal_identity: driver mismatch");
    const auto dr = process::reversed_driver(d);
    double a = 0.0, b = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      a += lhs.values[j] * d.inc(j);
      b += rhs.values[j] * dr.inc(j);
    }
    out.pathwise_residual = std::max(out.pathwise_residual, std::abs(a - b));
  }
  return out;
}

double holder_norm_estimate(const NodePath& path, double eta) {
  const std::size_t n = path.grid.n;
  double sup = 0.0;
  for (double v : path.values) sup = std::max(sup, std::abs(v));
  double q = 0.0;
  for (std::size_t h = 1; h <= n; h *= 2) {
    const double denom = std::pow(static_cast<double>(h) * path.grid.dt(), eta);
    for (std::size_t i = 0; i + h <= n; ++i)
      for (std::size_t c = 0; c < path.dim; ++c)
        q = std::max(q, std::abs(path.at(i + h, c) - path.at(i, c)) / denom);
  }
  return q + sup;
}

void write_refinement_csv(std::ostream& os, const std::vector<RefinementRow>& rows) {
  os << "mesh,R_pi,reference,abs_err\n";
  for (const auto& r : rows)
    os << format_double(r.mesh) << ',' << format_double(r.R_pi) << ',' << format_double(r.reference) << ','
       << format_double(r.abs_err) << "\n";
}

}  // namespace volterra::integ

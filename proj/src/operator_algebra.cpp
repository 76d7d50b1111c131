#include "volterra/operator_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "volterra/format.hpp"

namespace volterra::ops {

DiscreteOperator::DiscreteOperator(const TimeGrid& g, Matrix m) : grid(g), M(std::move(m)) {
  if (M.rows() != g.n || M.cols() != g.n)
    throw std::invalid_argument("DiscreteOperator: matrix must be n x n");
}

GridFunction DiscreteOperator::apply(const GridFunction& f) const {
  if (!(f.grid == grid)) throw std::invalid_argument("DiscreteOperator::apply: grid mismatch");
  GridFunction out(grid, f.dim);
  const std::size_t n = grid.n;
  for (std::size_t i = 0; i < n; ++i) {
    auto mi = M.row(i);
    for (std::size_t c = 0; c < f.dim; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += mi[j] * f.values[j * f.dim + c];
      out.values[i * f.dim + c] = s;
    }
  }
  return out;
}

std::vector<double> DiscreteOperator::apply(std::span<const double> f) const {
  return multiply(M, f);
}

GridFunction reverse(const GridFunction& f) {
  GridFunction out(f.grid, f.dim);
  const std::size_t n = f.grid.n;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t c = 0; c < f.dim; ++c) out.at(j, c) = f.at(n - 1 - j, c);
  return out;
}

DiscreteOperator reverse_op(const TimeGrid& grid) {
  Matrix R(grid.n, grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) R(j, grid.n - 1 - j) = 1.0;
  return DiscreteOperator(grid, std::move(R));
}

DiscreteOperator projection_at(Resolution E, std::size_t k, const TimeGrid& grid) {
  if (k > grid.n) throw std::invalid_argument("projection_at: node index out of range");
  Matrix P(grid.n, grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) {
    const bool keep = (E == Resolution::Forward) ? (j < k) : (j >= grid.n - k);
    if (keep) P(j, j) = 1.0;
  }
  DiscreteOperator op(grid, std::move(P));
  op.causal_forward = Tri::yes;  // diagonal operators are causal for both resolutions
  op.causal_reversed = Tri::yes;
  return op;
}

DiscreteOperator projection(Resolution E, double lambda, const TimeGrid& grid) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("projection: lambda outside [0,1]");
  return projection_at(E, grid.snap(lambda * grid.T), grid);
}

DiscreteOperator adjoint(const DiscreteOperator& V) {
  DiscreteOperator out(V.grid, transpose(V.M));
  // The adjoint swaps lower and upper triangular structure.
  out.causal_forward = V.causal_reversed;
  out.causal_reversed = V.causal_forward;
  return out;
}

DiscreteOperator compose(const DiscreteOperator& A, const DiscreteOperator& B) {
  if (!(A.grid == B.grid)) throw std::invalid_argument("compose: grid mismatch");
  return DiscreteOperator(A.grid, multiply(A.M, B.M));
}

CausalityReport is_causal(const DiscreteOperator& V, Resolution E, double tol) {
  CausalityReport rep;
  const std::size_t n = V.grid.n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const bool offending = (E == Resolution::Forward) ? (j > i) : (j < i);
      if (offending) rep.max_violation = std::max(rep.max_violation, std::abs(V.M(i, j)));
    }
  rep.causal = rep.max_violation <= tol;
  return rep;
}

CausalityReport is_causal_bruteforce(const DiscreteOperator& V, Resolution E, double tol) {
  CausalityReport rep;
  const std::size_t n = V.grid.n;
  for (std::size_t k = 0; k <= n; ++k) {
    // E V E - E V = E V (E - Id): keep rows in E, columns outside E.
    for (std::size_t i = 0; i < n; ++i) {
      const bool row_in = (E == Resolution::Forward) ? (i < k) : (i >= n - k);
      if (!row_in) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const bool col_in = (E == Resolution::Forward) ? (j < k) : (j >= n - k);
        if (!col_in) rep.max_violation = std::max(rep.max_violation, std::abs(V.M(i, j)));
      }
    }
  }
  rep.causal = rep.max_violation <= tol;
  return rep;
}

std::vector<std::size_t> dyadic_partition(const TimeGrid& grid, std::size_t blocks) {
  if (blocks == 0) throw std::invalid_argument("dyadic_partition: need at least one block");
  blocks = std::min(blocks, grid.n);
  std::vector<std::size_t> b;
  b.reserve(blocks + 1);
  for (std::size_t l = 0; l <= blocks; ++l) {
    const std::size_t k = static_cast<std::size_t>(
        std::llround(static_cast<double>(l) * static_cast<double>(grid.n) / static_cast<double>(blocks)));
    if (b.empty() || k != b.back()) b.push_back(k);
  }
  return b;
}

StrictCausalityReport is_strictly_causal(const DiscreteOperator& V, Resolution E, double eps) {
  if (!is_causal(V, E).causal)
    throw std::invalid_argument("is_strictly_causal: operator is not causal for this resolution");
  StrictCausalityReport rep;
  rep.largest_block_norm = std::numeric_limits<double>::infinity();
  const std::size_t n = V.grid.n;
  for (std::size_t blocks = 1;; blocks *= 2) {
    const auto part = dyadic_partition(V.grid, blocks);
    ++rep.levels_tried;
    double worst = 0.0;
    for (std::size_t l = 0; l + 1 < part.size(); ++l) {
      const std::size_t a = part[l], b = part[l + 1];
      Matrix blk(b - a, b - a);
      for (std::size_t i = a; i < b; ++i)
        for (std::size_t j = a; j < b; ++j) blk(i - a, j - a) = V.M(i, j);
      worst = std::max(worst, spectral_norm(blk));
      if (worst >= eps) break;
    }
    if (worst < eps) {
      rep.strictly_causal = true;
      rep.partition = part;
      rep.largest_block_norm = worst;
      return rep;
    }
    rep.largest_block_norm = std::min(rep.largest_block_norm, worst);
    if (blocks >= n) break;
  }
  return rep;
}

double trace(const DiscreteOperator& V) { return volterra::trace(V.M); }

std::vector<double> trace_powers(const DiscreteOperator& V, std::size_t K) {
  std::vector<double> out;
  out.reserve(K);
  Matrix P = V.M;
  for (std::size_t k = 1; k <= K; ++k) {
    out.push_back(volterra::trace(P));
    if (k < K) P = multiply(P, V.M);
  }
  return out;
}

DiscreteOperator reversed_operator(const DiscreteOperator& V) {
  const std::size_t n = V.grid.n;
  Matrix R(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) R(i, j) = V.M(n - 1 - i, n - 1 - j);
  DiscreteOperator out(V.grid, std::move(R));
  out.causal_forward = V.causal_reversed;
  out.causal_reversed = V.causal_forward;
  return out;
}

NodePath path_reversal_theta(const NodePath& w) {
  const std::size_t n = w.grid.n;
  for (std::size_t c = 0; c < w.dim; ++c)
    if (w.at(0, c) != 0.0) throw std::invalid_argument("path_reversal_theta: path must start at 0");
  NodePath out(w.grid, w.dim);
  for (std::size_t k = 0; k <= n; ++k)
    for (std::size_t c = 0; c < w.dim; ++c) out.at(k, c) = w.at(n, c) - w.at(n - k, c);
  return out;
}

void write_operator_csv(std::ostream& os, const DiscreteOperator& V) {
  os << "# n=" << V.grid.n << " T=" << format_double(V.grid.T) << "\n";
  for (std::size_t i = 0; i < V.grid.n; ++i) {
    for (std::size_t j = 0; j < V.grid.n; ++j) {
      if (j) os << ',';
      os << format_double(V.M(i, j));
    }
    os << "\n";
  }
}

}  // namespace volterra::ops

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "volterra/grid.hpp"
#include "volterra/matrix.hpp"

namespace volterra::ops {

enum class Tri { unknown, yes, no };

// Linear map on cell-valued grid functions. Quadrature weights live inside M,
// so (Vf)(cell i) = sum_j M(i,j) f(cell j), applied to every component alike.
struct DiscreteOperator {
  TimeGrid grid;
  Matrix M;
  Tri causal_forward = Tri::unknown;
  Tri causal_reversed = Tri::unknown;

  DiscreteOperator() = default;
  DiscreteOperator(const TimeGrid& g, Matrix m);

  std::size_t size() const { return grid.n; }
  GridFunction apply(const GridFunction& f) const;
  std::vector<double> apply(std::span<const double> f) const;
};

enum class Resolution { Forward, Reversed };

// Cell mirror: (tau f)(cell j) = f(cell n-1-j).
GridFunction reverse(const GridFunction& f);
DiscreteOperator reverse_op(const TimeGrid& grid);

// Diagonal 0/1 projection. lambda*T is snapped to the nearest node.
// Forward keeps cells in [0, lambda T), Reversed keeps [(1-lambda) T, T).
DiscreteOperator projection(Resolution E, double lambda, const TimeGrid& grid);
// Same, addressed by node index k (Forward: cells < k; Reversed: cells >= n-k).
DiscreteOperator projection_at(Resolution E, std::size_t k, const TimeGrid& grid);

DiscreteOperator adjoint(const DiscreteOperator& V);
DiscreteOperator compose(const DiscreteOperator& A, const DiscreteOperator& B);

struct CausalityReport {
  bool causal = false;
  double max_violation = 0.0;
};

// max over node-aligned lambda of |E V E - E V|. For the forward resolution the
// union of these residuals is exactly the strictly upper part of M, for the
// reversed resolution the strictly lower part, which is what gets scanned.
CausalityReport is_causal(const DiscreteOperator& V, Resolution E, double tol = 1e-12);
// Literal check over every node-aligned lambda (O(n^3)), kept for tests.
CausalityReport is_causal_bruteforce(const DiscreteOperator& V, Resolution E, double tol = 1e-12);

struct StrictCausalityReport {
  bool strictly_causal = false;
  std::vector<std::size_t> partition;  // node indices of the witness, empty on failure
  double largest_block_norm = 0.0;     // at the witness, or the best level tried
  std::size_t levels_tried = 0;
};

// Dyadic partitions from one block down to single cells; the first level whose
// diagonal blocks all have operator norm below eps is the witness.
StrictCausalityReport is_strictly_causal(const DiscreteOperator& V, Resolution E, double eps);

std::vector<std::size_t> dyadic_partition(const TimeGrid& grid, std::size_t blocks);

double trace(const DiscreteOperator& V);
std::vector<double> trace_powers(const DiscreteOperator& V, std::size_t K);

// tau V tau, i.e. M(n-1-i, n-1-j).
DiscreteOperator reversed_operator(const DiscreteOperator& V);

// Theta_T on node paths: w(k) -> w(n) - w(n-k). Requires w(0) = 0.
NodePath path_reversal_theta(const NodePath& w);

void write_operator_csv(std::ostream& os, const DiscreteOperator& V);

}  // namespace volterra::ops

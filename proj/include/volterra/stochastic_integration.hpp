#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "volterra/grid.hpp"
#include "volterra/matrix.hpp"
#include "volterra/operator_algebra.hpp"
#include "volterra/volterra_process.hpp"

namespace volterra::integ {

enum class BaseKind { OfDriver, OfVolterra, Deterministic };

// Which node values of the base path represent cell i.
// Left: t_i. Right: t_{i+1}. Trapezoid: average of g at both ends.
enum class Sampling { Left, Right, Trapezoid };

// u(s) = g(base(s)) with g' supplied, or a deterministic cell function.
struct CylindricalProcess {
  TimeGrid grid;
  BaseKind base = BaseKind::Deterministic;
  std::function<double(double)> g;
  std::function<double(double)> gprime;
  std::vector<double> values;  // Deterministic only
  Sampling sampling = Sampling::Trapezoid;

  static CylindricalProcess of_driver(const TimeGrid& grid, std::function<double(double)> g,
                                      std::function<double(double)> gprime, Sampling s = Sampling::Trapezoid);
  static CylindricalProcess of_volterra(const TimeGrid& grid, std::function<double(double)> g,
                                        std::function<double(double)> gprime, Sampling s = Sampling::Trapezoid);
  static CylindricalProcess deterministic(const TimeGrid& grid, std::vector<double> values);

  // Compares g' with central differences of g at 10 points of [-2,2]; throws on mismatch.
  void validate(double rel_tol = 1e-6) const;
};

// Sampled quantities a cylindrical process may depend on, for one driver path.
struct PathContext {
  TimeGrid grid;
  std::vector<double> dB;  // scalar driver increments
  NodePath B;              // cumulative driver
  NodePath W;              // Volterra path (empty when no table is given)
  const Matrix* G = nullptr;
};

// G may be null when only OfDriver and Deterministic integrands are used.
PathContext make_context(const process::BrownianDriver& driver, const Matrix* G);

std::vector<double> cell_values(const CylindricalProcess& u, const PathContext& ctx);

// A(j,i) = derivative of u on cell i with respect to the driver increment on cell j,
// i.e. the gradient density at r in cell j.
Matrix gradient_matrix(const CylindricalProcess& u, const PathContext& ctx);

struct TraceTerm {
  double total = 0.0;               // dt * sum_j density_j
  std::vector<double> density;      // D u(r_j) = sum_i M(j,i) A(j,i)
  double composition_trace = 0.0;   // dt * trace(M A^T) through an explicit product
};

// Refuses operators with a non-zero diagonal (no smoothing, trace undefined).
TraceTerm trace_term(const Matrix& A, const ops::DiscreteOperator& V, bool with_composition = true);

// Coefficient of a step integrand on one block. Only the gradient on the block's
// own cells enters the divergence, so only that part is stored.
struct StepCoefficient {
  double value = 0.0;
  std::vector<double> block_gradient;
};

// sum_i F_i dB(block i) - dt sum_i sum_{j in block i} grad_j F_i.
double skorokhod_step_integral(const std::vector<std::size_t>& partition, const std::vector<StepCoefficient>& F,
                               std::span<const double> dB, double dt);

// Riemann-Stratonovich sum R^pi for the integrand V u on a node partition.
double stratonovich_sum(const ops::DiscreteOperator& V, std::span<const double> u, const Matrix& A,
                        std::span<const double> dB, const std::vector<std::size_t>& partition);

struct RefinementRow {
  double mesh = 0.0;
  double R_pi = 0.0;
  double reference = 0.0;
  double abs_err = 0.0;
};

struct StratonovichResult {
  double divergence = 0.0;  // delta(V u)
  double trace = 0.0;       // int D u
  double reference = 0.0;   // divergence + trace
  std::vector<RefinementRow> table;  // meshes T/coarsest_blocks ... dt
};

StratonovichResult stratonovich_integral(const CylindricalProcess& u, const ops::DiscreteOperator& V,
                                         const PathContext& ctx, std::size_t coarsest_blocks = 8);

struct ReversalIdentity {
  double max_coef_discrepancy = 0.0;
  double pathwise_residual = 0.0;
  std::vector<double> lhs;           // coefficients on dB
  std::vector<double> rhs_mirrored;  // coefficients on reversed dB, mirrored onto dB cells
};

// Windows are node indices r <= t. Pathwise residual is the max over the given drivers.
ReversalIdentity verify_reversal_identity(const process::VolterraModel& model, std::size_t r, std::size_t t,
                                          std::span<const double> u,
                                          const std::vector<process::BrownianDriver>& drivers = {});

// sup over dyadic lags of |f(t+h)-f(t)|/h^eta plus sup |f|.
double holder_norm_estimate(const NodePath& path, double eta);

void write_refinement_csv(std::ostream& os, const std::vector<RefinementRow>& rows);

}  // namespace volterra::integ

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "volterra/fractional_calculus.hpp"
#include "volterra/grid.hpp"
#include "volterra/matrix.hpp"
#include "volterra/operator_algebra.hpp"

namespace volterra::process {

enum class ModelKind { Levy, StationaryFbm, Multifractional, Custom };

std::string to_string(ModelKind k);

// Default sub-cell refinement of the K_H factorization.
inline constexpr std::size_t kDefaultKHRefinement = 128;

struct VolterraModel {
  ModelKind kind = ModelKind::Levy;
  frac::HurstSpec hurst;
  TimeGrid grid;
  ops::DiscreteOperator V;       // reversed-causal (upper triangular)
  ops::DiscreteOperator Vcheck;  // tau V tau, forward-causal
  Matrix G;                      // (n+1) x n, row i = V 1_{[0,t_i]} on cells
  double p = 0.0;
  double eta = 0.0;
};

// p = ceil(2/(H-1/2)) + 2 and eta = H - 1/2 - 1/p.
double integrability_p(double H);
double holder_eta(double H);

// Variance constant of the K_H construction: Var W(t) = c_H t^{2H}.
double stationary_fbm_variance_constant(double H);

ops::DiscreteOperator build_levy_operator(double H, const TimeGrid& grid);

// K_H factorization x^{-g} I^g_{T-} x^{g} (g = H - 1/2) assembled on a grid
// refined `refinement` times per cell and sampled back on the coarse cells.
Matrix KH_indicator_table(double H, const TimeGrid& grid, std::size_t refinement = kDefaultKHRefinement);
ops::DiscreteOperator build_KH_operator(double H, const TimeGrid& grid,
                                        std::size_t refinement = kDefaultKHRefinement);

// Row i from the kernel K_{H(t_i)}(t_i, .) read at the right end of each cell.
Matrix multifractional_indicator_table(const frac::HurstSpec& spec, const TimeGrid& grid);
ops::DiscreteOperator build_multifractional_operator(const frac::HurstSpec& spec, const TimeGrid& grid);

// G(i,:) = V 1_{cells < i}, i = 0..n.
Matrix indicator_column_table(const ops::DiscreteOperator& V);
// Inverse map: M(j,k) = G(k+1,j) - G(k,j).
ops::DiscreteOperator operator_from_indicator_table(const Matrix& G, const TimeGrid& grid);

VolterraModel make_levy_model(double H, const TimeGrid& grid);
VolterraModel make_stationary_model(double H, const TimeGrid& grid,
                                    std::size_t refinement = kDefaultKHRefinement);
VolterraModel make_multifractional_model(const frac::HurstSpec& spec, const TimeGrid& grid);
// Wraps an arbitrary operator; p and eta are taken from H.
VolterraModel make_custom_model(const ops::DiscreteOperator& V, double H);

// C(i,k) = dt sum_j G(i,j) G(k,j), nodes 0..n.
Matrix covariance_gram(const VolterraModel& model);

struct BrownianDriver {
  std::uint64_t seed = 0;
  std::uint32_t stream = 0;
  TimeGrid grid;
  std::size_t dim = 1;
  bool reversed = false;
  std::vector<double> increments;  // n x dim, row-major

  double inc(std::size_t j, std::size_t c = 0) const { return increments[j * dim + c]; }
  NodePath cumulative() const;
};

BrownianDriver make_driver(std::uint64_t seed, std::uint32_t stream, const TimeGrid& grid, std::size_t dim = 1);
BrownianDriver reversed_driver(const BrownianDriver& d);

// W(t_i) = sum_j G(i,j) dB_j per component; W(t_0) = 0.
NodePath sample_path(const VolterraModel& model, const BrownianDriver& driver);
NodePath sample_path(const Matrix& G, const BrownianDriver& driver);

// Log-log slope of max increments against dyadic lags h with 4h <= n. With
// `normalize` each max is divided by sqrt(2 log(n/h)), the growth of a Gaussian
// maximum over n/h windows, which otherwise biases the slope down.
double holder_exponent_estimate(const NodePath& path, bool normalize = true);

void write_path_csv(std::ostream& os, const NodePath& path);
void write_gram_csv(std::ostream& os, const Matrix& C, double H);

}  // namespace volterra::process

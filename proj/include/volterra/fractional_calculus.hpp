#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "volterra/grid.hpp"
#include "volterra/matrix.hpp"
#include "volterra/operator_algebra.hpp"

namespace volterra::frac {

// Hurst index: constant, or a function of time with a declared Hoelder exponent.
struct HurstSpec {
  bool varying = false;
  double H0 = 0.75;
  std::function<double(double)> H;
  double eta_H = 0.0;

  static HurstSpec constant(double H);
  static HurstSpec varying_fn(std::function<double(double)> fn, double eta_H);
  double at(double t) const { return varying ? H(t) : H0; }
  // Throws unless 1/2 < H < 1 (constant) or inf H > eta_H > 1/2 on the grid nodes.
  void validate(const TimeGrid& grid) const;
};

// Gamma(x) for x > 0, throws std::domain_error otherwise.
double gamma_fn(double x);

struct Hyp2F1Result {
  double value = 0.0;
  std::size_t terms = 0;   // series terms summed (both series for the connection branch)
  bool pfaff = false;      // z < 0 was mapped to z/(z-1)
  bool connection = false; // argument near 1 was mapped to 1 - w
};

// Gauss hypergeometric 2F1(a,b;c;z) for z <= 0 or 0 <= z < 1.
Hyp2F1Result gauss_2f1_detailed(double a, double b, double c, double z);
double gauss_2f1(double a, double b, double c, double z);
// Terms of the plain power series at argument w (no transformations), for diagnostics.
std::vector<double> gauss_2f1_series_terms(double a, double b, double c, double w, std::size_t count);

// (t-r)^{H-1/2}/Gamma(H+1/2) for r < t, 0 otherwise.
double kernel_levy(double H, double t, double r);
// Stationary-increment fBm kernel through 2F1 with z = 1 - t/r. Needs r > 0.
double kernel_KH(double H, double t, double r);

// Product-integration matrix of I^gamma_{0+}: strictly lower triangular Toeplitz,
// row i holds the value at node t_i. gamma = 0 gives the identity.
Matrix left_frac_matrix(double gamma, const TimeGrid& grid);
// Exact transpose of the left matrix.
Matrix right_frac_matrix(double gamma, const TimeGrid& grid);

ops::DiscreteOperator left_frac_operator(double gamma, const TimeGrid& grid);
ops::DiscreteOperator right_frac_operator(double gamma, const TimeGrid& grid);

GridFunction left_frac_integral(double gamma, const GridFunction& f);
GridFunction right_frac_integral(double gamma, const GridFunction& f);
// Node-valued left integral, k = 0..n. Node n carries the value at T.
NodePath left_frac_integral_nodes(double gamma, const GridFunction& f);

enum class WeightSampling { CellLeft, CellMid };

// Diagonal operator f -> w f with w sampled per cell.
ops::DiscreteOperator weighted_multiplier(const std::function<double(double)>& w, const TimeGrid& grid,
                                          WeightSampling at = WeightSampling::CellMid);

}  // namespace volterra::frac

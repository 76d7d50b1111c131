#pragma once

#include <cstddef>
#include <vector>

namespace volterra {

// Uniform partition of [0,T]. Node k sits at k*dt, cell j is [t_j, t_{j+1}).
struct TimeGrid {
  double T = 1.0;
  std::size_t n = 2;

  TimeGrid() = default;
  TimeGrid(double horizon, std::size_t steps);

  double dt() const { return T / static_cast<double>(n); }
  double node(std::size_t k) const { return T * static_cast<double>(k) / static_cast<double>(n); }
  double cell_left(std::size_t j) const { return node(j); }
  double cell_mid(std::size_t j) const {
    return T * (static_cast<double>(j) + 0.5) / static_cast<double>(n);
  }
  // Nearest node index to time t (clamped to [0,n]).
  std::size_t snap(double t) const;

  bool operator==(const TimeGrid& o) const { return T == o.T && n == o.n; }
};

// Cell-valued function: values[j*dim + c] is component c on cell j.
struct GridFunction {
  TimeGrid grid;
  std::size_t dim = 1;
  std::vector<double> values;

  GridFunction() = default;
  GridFunction(const TimeGrid& g, std::size_t d = 1, double fill = 0.0);
  GridFunction(const TimeGrid& g, std::vector<double> v);  // scalar, one value per cell

  double& at(std::size_t j, std::size_t c = 0) { return values[j * dim + c]; }
  double at(std::size_t j, std::size_t c = 0) const { return values[j * dim + c]; }
};

// Node-valued path: values[k*dim + c] at node t_k, k = 0..n.
struct NodePath {
  TimeGrid grid;
  std::size_t dim = 1;
  std::vector<double> values;

  NodePath() = default;
  NodePath(const TimeGrid& g, std::size_t d = 1, double fill = 0.0);

  double& at(std::size_t k, std::size_t c = 0) { return values[k * dim + c]; }
  double at(std::size_t k, std::size_t c = 0) const { return values[k * dim + c]; }
};

// Discrete L2 inner product <f,g> = dt * sum_j f_j g_j (all components).
double inner(const GridFunction& f, const GridFunction& g);

}  // namespace volterra

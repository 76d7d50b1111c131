#include "volterra/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace volterra {

TimeGrid::TimeGrid(double horizon, std::size_t steps) : T(horizon), n(steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("TimeGrid: horizon must be positive and finite");
  if (steps < 2) throw std::invalid_argument("TimeGrid: need at least 2 steps");
}

std::size_t TimeGrid::snap(double t) const {
  if (!(t > 0.0)) return 0;
  const double k = std::round(t / T * static_cast<double>(n));
  if (k >= static_cast<double>(n)) return n;
  return static_cast<std::size_t>(k);
}

GridFunction::GridFunction(const TimeGrid& g, std::size_t d, double fill)
    : grid(g), dim(d), values(g.n * d, fill) {
  if (d == 0) throw std::invalid_argument("GridFunction: dim must be positive");
}

GridFunction::GridFunction(const TimeGrid& g, std::vector<double> v)
    : grid(g), dim(1), values(std::move(v)) {
  if (values.size() != g.n) throw std::invalid_argument("GridFunction: length must equal grid.n");
}

NodePath::NodePath(const TimeGrid& g, std::size_t d, double fill)
    : grid(g), dim(d), values((g.n + 1) * d, fill) {
  if (d == 0) throw std::invalid_argument("NodePath: dim must be positive");
}

double inner(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid == g.grid) || f.dim != g.dim) throw std::invalid_argument("inner: grid mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < f.values.size(); ++k) s += f.values[k] * g.values[k];
  return f.grid.dt() * s;
}

}  // namespace volterra

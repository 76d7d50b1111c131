#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "volterra/fractional_calculus.hpp"
#include "volterra/stochastic_integration.hpp"

using namespace volterra;

namespace {
auto id = [](double x) { return x; };
auto one = [](double) { return 1.0; };
}  // namespace

TEST_CASE("cylindrical process derivative check") {
  const TimeGrid grid(1.0, 8);
  auto good = integ::CylindricalProcess::of_driver(
      grid, [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); });
  CHECK_NOTHROW(good.validate());
  auto bad = integ::CylindricalProcess::of_driver(
      grid, [](double x) { return std::sin(x); }, [](double x) { return -std::cos(x); });
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(integ::CylindricalProcess::deterministic(grid, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("gradient of the driver") {
  const TimeGrid grid(1.0, 6);
  const auto d = process::make_driver(1, 0, grid);
  const auto ctx = integ::make_context(d, nullptr);
  const auto right = integ::gradient_matrix(integ::CylindricalProcess::of_driver(grid, id, one, integ::Sampling::Right), ctx);
  const auto left = integ::gradient_matrix(integ::CylindricalProcess::of_driver(grid, id, one, integ::Sampling::Left), ctx);
  for (std::size_t j = 0; j < 6; ++j)
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(right(j, i) == (j <= i ? 1.0 : 0.0));
      CHECK(left(j, i) == (j < i ? 1.0 : 0.0));
    }
  const auto vals = integ::cell_values(integ::CylindricalProcess::of_driver(grid, id, one, integ::Sampling::Left), ctx);
  CHECK(vals[0] == 0.0);
  CHECK(vals[3] == doctest::Approx(ctx.B.at(3)));
}

TEST_CASE("volterra base needs the table") {
  const TimeGrid grid(1.0, 6);
  const auto ctx = integ::make_context(process::make_driver(1, 0, grid), nullptr);
  const auto u = integ::CylindricalProcess::of_volterra(grid, id, one);
  CHECK_THROWS_AS(integ::cell_values(u, ctx), std::invalid_argument);
}

TEST_CASE("anti-causal trace example") {
  // u = W for V = I^1_{T-}: the trace density is r^2/2, total T^3/6
  const TimeGrid grid(1.0, 512);
  const auto V = frac::right_frac_operator(1.0, grid);
  const Matrix G = process::indicator_column_table(V);
  const auto ctx = integ::make_context(process::make_driver(2, 0, grid), &G);
  const auto u = integ::CylindricalProcess::of_volterra(grid, id, one, integ::Sampling::Left);
  const auto tt = integ::trace_term(integ::gradient_matrix(u, ctx), V);
  CHECK(std::abs(tt.total - 1.0 / 6.0) <= 5e-3);
  CHECK(std::abs(tt.total - tt.composition_trace) <= 1e-10);
  CHECK(tt.density[256] == doctest::Approx(0.125).epsilon(1e-2));
}

TEST_CASE("adapted integrands have zero trace under causal smoothing") {
  const TimeGrid grid(1.0, 128);
  const auto ctx = integ::make_context(process::make_driver(3, 0, grid), nullptr);
  const auto u = integ::CylindricalProcess::of_driver(
      grid, [](double x) { return x * x; }, [](double x) { return 2 * x; }, integ::Sampling::Right);
  const auto A = integ::gradient_matrix(u, ctx);
  const auto tt = integ::trace_term(A, frac::left_frac_operator(1.0, grid));
  CHECK(tt.total == 0.0);
  CHECK(std::abs(tt.composition_trace) <= 1e-12);
  // an operator with a diagonal is refused
  const ops::DiscreteOperator I(grid, Matrix::identity(128));
  CHECK_THROWS_AS(integ::trace_term(A, I), std::invalid_argument);
}

TEST_CASE("skorokhod integral of step integrands") {
  const TimeGrid grid(1.0, 8);
  const auto d = process::make_driver(4, 0, grid);
  const std::vector<std::size_t> part = {0, 4, 8};
  integ::StepCoefficient a{2.0, std::vector<double>(4, 0.0)};
  integ::StepCoefficient b{-1.0, std::vector<double>(4, 0.0)};
  double db1 = 0.0, db2 = 0.0;
  for (std::size_t j = 0; j < 4; ++j) db1 += d.inc(j);
  for (std::size_t j = 4; j < 8; ++j) db2 += d.inc(j);
  CHECK(integ::skorokhod_step_integral(part, {a, b}, d.increments, grid.dt()) ==
        doctest::Approx(2.0 * db1 - db2).epsilon(1e-14));
  // gradient of one on the block subtracts dt per cell
  a.block_gradient.assign(4, 1.0);
  CHECK(integ::skorokhod_step_integral(part, {a, b}, d.increments, grid.dt()) ==
        doctest::Approx(2.0 * db1 - db2 - 0.5).epsilon(1e-14));
  CHECK_THROWS_AS(integ::skorokhod_step_integral(part, {a}, d.increments, grid.dt()), std::invalid_argument);
}

TEST_CASE("stratonovich sums and the chain rule") {
  const TimeGrid grid(1.0, 128);
  const auto m = process::make_stationary_model(0.7, grid);
  const auto u = integ::CylindricalProcess::of_volterra(grid, id, one, integ::Sampling::Trapezoid);
  const auto unit = integ::CylindricalProcess::deterministic(grid, std::vector<double>(128, 1.0));
  for (std::uint32_t p = 0; p < 5; ++p) {
    const auto ctx = integ::make_context(process::make_driver(8, p, grid), &m.G);
    const auto s = integ::stratonovich_integral(u, m.V, ctx);
    const double WT = ctx.W.at(128);
    CHECK(std::abs(s.reference - 0.5 * WT * WT) <= 1e-10 * (1.0 + WT * WT));
    CHECK(s.reference == doctest::Approx(s.divergence + s.trace));
    REQUIRE(s.table.size() == 5);  // meshes T/8 .. T/128
    CHECK(s.table.front().mesh == doctest::Approx(0.125));
    CHECK(s.table.back().abs_err <= 1e-10);
    const auto su = integ::stratonovich_integral(unit, m.V, ctx);
    CHECK(std::abs(su.table.back().R_pi - WT) <= 1e-10);
    CHECK(su.trace == 0.0);
  }
}

TEST_CASE("reversal identity on random windows") {
  const TimeGrid grid(1.0, 64);
  const auto m = process::make_levy_model(0.75, grid);
  std::vector<double> u(64);
  for (std::size_t j = 0; j < 64; ++j) u[j] = std::cos(5.0 * grid.cell_mid(j));
  const std::vector<process::BrownianDriver> drivers = {process::make_driver(1, 0, grid)};
  for (auto [r, t] : std::vector<std::pair<std::size_t, std::size_t>>{{0, 64}, {10, 40}, {31, 32}, {5, 5}}) {
    const auto rep = integ::verify_reversal_identity(m, r, t, u, drivers);
    CHECK(rep.max_coef_discrepancy <= 1e-10);
    CHECK(rep.pathwise_residual <= 1e-10);
  }
  CHECK_THROWS_AS(integ::verify_reversal_identity(m, 40, 10, u), std::invalid_argument);
}

TEST_CASE("hoelder norm") {
  const TimeGrid grid(1.0, 16);
  NodePath zero(grid);
  CHECK(integ::holder_norm_estimate(zero, 0.5) == 0.0);
  NodePath lin(grid);
  for (std::size_t k = 0; k <= 16; ++k) lin.at(k) = grid.node(k);
  CHECK(integ::holder_norm_estimate(lin, 1.0) == doctest::Approx(2.0));
}

TEST_CASE("refinement csv") {
  std::ostringstream os;
  integ::write_refinement_csv(os, {{0.5, 1.0, 1.25, 0.25}});
  CHECK(os.str() == "mesh,R_pi,reference,abs_err\n0.5,1,1.25,0.25\n");
}

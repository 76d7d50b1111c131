#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "volterra/fractional_calculus.hpp"
#include "volterra/operator_algebra.hpp"

using namespace volterra;

// Reference values below were computed with mpmath at 30 digits.

TEST_CASE("gamma function") {
  CHECK(frac::gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-14));
  CHECK(frac::gamma_fn(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
  CHECK(1.0 / frac::gamma_fn(1.25) == doctest::Approx(1.1032626513208373).epsilon(1e-14));
  CHECK_THROWS_AS(frac::gamma_fn(0.0), std::domain_error);
  CHECK_THROWS_AS(frac::gamma_fn(-1.5), std::domain_error);
}

TEST_CASE("2F1 at zero and ln2") {
  for (double a : {0.3, 1.0, -0.7})
    for (double c : {0.9, 1.5}) CHECK(frac::gauss_2f1(a, 0.25, c, 0.0) == 1.0);
  CHECK(std::abs(frac::gauss_2f1(1.0, 1.0, 2.0, -1.0) - std::log(2.0)) <= 1e-12);
}

TEST_CASE("2F1 against frozen values on every branch") {
  // plain series
  auto r = frac::gauss_2f1_detailed(0.5, 0.25, 1.25, 0.6);
  CHECK(r.value == doctest::Approx(1.0840168338961045).epsilon(1e-12));
  CHECK_FALSE(r.pfaff);

  // z < 0 goes through Pfaff
  r = frac::gauss_2f1_detailed(-0.3, 0.7, 1.4, -3.5);
  CHECK(r.value == doctest::Approx(1.3274205771555563).epsilon(1e-12));
  CHECK(r.pfaff);

  // close to 1
  r = frac::gauss_2f1_detailed(0.2, 0.3, 0.9, 0.95);
  CHECK(r.value == doctest::Approx(1.1437761288948111).epsilon(1e-11));
}

TEST_CASE("2F1 series terms follow the ratio recurrence") {
  const auto t = frac::gauss_2f1_series_terms(0.5, 0.25, 1.25, 0.6, 6);
  REQUIRE(t.size() == 6);
  CHECK(t[0] == 1.0);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double kk = static_cast<double>(k);
    const double ratio = (0.5 + kk) * (0.25 + kk) / ((1.25 + kk) * (kk + 1.0)) * 0.6;
    CHECK(t[k + 1] == doctest::Approx(t[k] * ratio).epsilon(1e-14));
  }
}

TEST_CASE("kernels") {
  CHECK(frac::kernel_levy(0.75, 1.0, 0.5) ==
        doctest::Approx(std::pow(0.5, 0.25) / frac::gamma_fn(1.25)).epsilon(1e-14));
  CHECK(frac::kernel_levy(0.75, 0.5, 0.7) == 0.0);

  CHECK(frac::kernel_KH(0.75, 1.0, 0.5) == doctest::Approx(0.96705967743735055).epsilon(1e-11));
  CHECK(frac::kernel_KH(0.75, 1.0, 0.001) == doctest::Approx(3.2283296644413482).epsilon(1e-11));
  CHECK(frac::kernel_KH(0.6, 1.0, 0.3) == doctest::Approx(1.0294583153317509).epsilon(1e-11));
  CHECK(frac::kernel_KH(0.8, 1.0, 0.5) == doctest::Approx(0.95859558160290399).epsilon(1e-11));
}

TEST_CASE("left fractional matrix shape") {
  const TimeGrid grid(1.0, 16);
  const Matrix L = frac::left_frac_matrix(0.4, grid);
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = i; j < 16; ++j) CHECK(L(i, j) == 0.0);
  // Toeplitz
  for (std::size_t i = 1; i < 16; ++i)
    for (std::size_t j = 0; j < i; ++j) CHECK(L(i, j) == L(i - j, 0));
  CHECK(frac::left_frac_matrix(0.0, grid) == Matrix::identity(16));
  CHECK(frac::right_frac_matrix(0.4, grid) == transpose(L));
  CHECK_THROWS_AS(frac::left_frac_matrix(1.7, grid), std::invalid_argument);
}

TEST_CASE("left integral of a constant is exact at the nodes") {
  const TimeGrid grid(2.0, 64);
  const GridFunction one(grid, 1, 1.0);
  for (double g : {0.25, 0.5, 0.75, 1.0}) {
    const NodePath p = frac::left_frac_integral_nodes(g, one);
    for (std::size_t k = 0; k <= 64; k += 8) {
      const double t = grid.node(k);
      CHECK(std::abs(p.at(k) - std::pow(t, g) / frac::gamma_fn(g + 1.0)) <= 1e-12);
    }
  }
}

TEST_CASE("integration by parts is exact") {
  const TimeGrid grid(1.0, 50);
  GridFunction f(grid), g(grid);
  for (std::size_t j = 0; j < 50; ++j) {
    f.at(j) = std::sin(3.0 * grid.cell_mid(j));
    g.at(j) = 1.0 + grid.cell_mid(j) * grid.cell_mid(j);
  }
  for (double gm : {0.1, 0.25, 0.5, 0.75, 1.0}) {
    const double lhs = inner(f, frac::left_frac_integral(gm, g));
    const double rhs = inner(frac::right_frac_integral(gm, f), g);
    CHECK(std::abs(lhs - rhs) <= 1e-13);
  }
}

TEST_CASE("hurst spec validation") {
  const TimeGrid grid(1.0, 8);
  CHECK_NOTHROW(frac::HurstSpec::constant(0.7).validate(grid));
  CHECK_THROWS_AS(frac::HurstSpec::constant(0.4).validate(grid), std::invalid_argument);
  CHECK_THROWS_AS(frac::HurstSpec::constant(1.0).validate(grid), std::invalid_argument);
  auto ok = frac::HurstSpec::varying_fn([](double t) { return 0.6 + 0.2 * t; }, 0.55);
  CHECK_NOTHROW(ok.validate(grid));
  CHECK(ok.at(0.5) == doctest::Approx(0.7));
  auto bad = frac::HurstSpec::varying_fn([](double t) { return 0.6 + 0.2 * t; }, 0.65);
  CHECK_THROWS_AS(bad.validate(grid), std::invalid_argument);
}

TEST_CASE("weighted multiplier is diagonal") {
  const TimeGrid grid(1.0, 10);
  const auto W = frac::weighted_multiplier([](double t) { return 2.0 * t; }, grid);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j)
      CHECK(W.M(i, j) == doctest::Approx(i == j ? 2.0 * grid.cell_mid(i) : 0.0));
  const auto Wl = frac::weighted_multiplier([](double t) { return 2.0 * t; }, grid, frac::WeightSampling::CellLeft);
  CHECK(Wl.M(3, 3) == doctest::Approx(2.0 * grid.cell_left(3)));
}

TEST_CASE("first order integrals of a constant") {
  const TimeGrid grid(1.0, 32);
  const GridFunction one(grid, 1, 1.0);
  const auto L = frac::left_frac_integral(1.0, one);
  const auto R = frac::right_frac_integral(1.0, one);
  for (std::size_t j = 0; j < 32; ++j) {
    CHECK(std::abs(L.at(j) - grid.node(j)) <= 1e-12);
    // value on cell j is the integral over [t_{j+1}, T], one cell short of T - t_j
    CHECK(std::abs(R.at(j) - (1.0 - grid.node(j + 1))) <= 1e-12);
  }
}

TEST_CASE("mirror turns the right integral into the left one") {
  const TimeGrid grid(1.0, 24);
  const auto tau = ops::reverse_op(grid);
  const auto lhs = ops::compose(tau, ops::compose(frac::right_frac_operator(0.35, grid), tau));
  CHECK(max_abs_diff(lhs.M, frac::left_frac_matrix(0.35, grid)) == 0.0);
}

TEST_CASE("kernel edge cases") {
  CHECK(frac::kernel_KH(0.75, 0.5, 0.7) == 0.0);
  CHECK(frac::kernel_KH(0.5000001, 1.0, 0.3) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK_THROWS_AS(frac::kernel_KH(0.75, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(frac::gauss_2f1(0.5, 0.5, 1.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(frac::gauss_2f1(0.5, 0.5, -2.0, 0.3), std::domain_error);
  const TimeGrid grid(1.0, 4);
  CHECK_THROWS_AS(frac::weighted_multiplier([](double t) { return 1.0 / t; }, grid, frac::WeightSampling::CellLeft),
                  std::domain_error);
}

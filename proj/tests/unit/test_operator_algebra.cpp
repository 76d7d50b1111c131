#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "volterra/fractional_calculus.hpp"
#include "volterra/operator_algebra.hpp"

using namespace volterra;

namespace {

Matrix random_matrix(std::size_t n, std::mt19937_64& gen, int band) {
  // band: -1 strictly lower, 0 lower with diagonal, 1 full
  std::normal_distribution<double> nd;
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (band == -1 && j >= i) continue;
      if (band == 0 && j > i) continue;
      m(i, j) = nd(gen);
    }
  return m;
}

}  // namespace

TEST_CASE("mirror and projections") {
  const TimeGrid grid(1.0, 12);
  const auto tau = ops::reverse_op(grid);
  const auto I = Matrix::identity(12);
  CHECK(ops::compose(tau, tau).M == I);

  for (std::size_t k = 0; k <= 12; ++k) {
    // tau e_r = (Id - e_{T-r}) tau
    const auto lhs = ops::compose(tau, ops::projection_at(ops::Resolution::Forward, k, grid));
    const auto rest = subtract(I, ops::projection_at(ops::Resolution::Forward, 12 - k, grid).M);
    const auto rhs = multiply(rest, tau.M);
    CHECK(max_abs_diff(lhs.M, rhs) == 0.0);
  }
  // lambda snaps to the nearest node
  CHECK(ops::projection(ops::Resolution::Forward, 0.5, grid).M ==
        ops::projection_at(ops::Resolution::Forward, 6, grid).M);
  CHECK(trace(ops::projection_at(ops::Resolution::Reversed, 5, grid)) == 5.0);
}

TEST_CASE("reverse on grid functions") {
  const TimeGrid grid(1.0, 5);
  const GridFunction f(grid, std::vector<double>{1, 2, 3, 4, 5});
  const auto r = ops::reverse(f);
  CHECK(r.values == std::vector<double>{5, 4, 3, 2, 1});
  CHECK(ops::reverse(r).values == f.values);
}

TEST_CASE("path reversal is an involution") {
  const TimeGrid grid(1.0, 6);
  NodePath w(grid);
  const std::vector<double> v = {0.0, 0.3, -0.1, 0.7, 0.2, 0.9, 1.1};
  w.values = v;
  const auto th = ops::path_reversal_theta(w);
  CHECK(th.at(0) == 0.0);
  CHECK(th.at(6) == doctest::Approx(1.1));
  CHECK(th.at(2) == doctest::Approx(1.1 - 0.2));
  const auto back = ops::path_reversal_theta(th);
  for (std::size_t k = 0; k <= 6; ++k) CHECK(std::abs(back.at(k) - v[k]) <= 1e-15);
  NodePath bad(grid, 1, 1.0);
  CHECK_THROWS_AS(ops::path_reversal_theta(bad), std::invalid_argument);
}

TEST_CASE("adjoint and reversed operator") {
  std::mt19937_64 gen(7);
  const TimeGrid grid(1.0, 9);
  const ops::DiscreteOperator V(grid, random_matrix(9, gen, 1));
  CHECK(ops::adjoint(ops::adjoint(V)).M == V.M);
  const auto R = ops::reversed_operator(V);
  CHECK(R.M(0, 2) == V.M(8, 6));
  CHECK(ops::reversed_operator(R).M == V.M);

  const auto L = frac::left_frac_operator(0.5, grid);
  CHECK(ops::is_causal(L, ops::Resolution::Forward).causal);
  CHECK_FALSE(ops::is_causal(L, ops::Resolution::Reversed).causal);
  CHECK(ops::is_causal(ops::reversed_operator(L), ops::Resolution::Reversed).causal);
  CHECK(ops::is_causal(frac::right_frac_operator(0.5, grid), ops::Resolution::Reversed).causal);
}

TEST_CASE("causality scan agrees with the literal definition") {
  std::mt19937_64 gen(11);
  const TimeGrid grid(1.0, 7);
  for (int band : {-1, 0, 1}) {
    const ops::DiscreteOperator V(grid, random_matrix(7, gen, band));
    for (auto E : {ops::Resolution::Forward, ops::Resolution::Reversed}) {
      const auto fast = ops::is_causal(V, E);
      const auto slow = ops::is_causal_bruteforce(V, E);
      CHECK(fast.causal == slow.causal);
      CHECK(fast.max_violation == doctest::Approx(slow.max_violation));
    }
  }
}

TEST_CASE("dyadic partitions") {
  const TimeGrid grid(1.0, 8);
  CHECK(ops::dyadic_partition(grid, 4) == std::vector<std::size_t>{0, 2, 4, 6, 8});
  CHECK(ops::dyadic_partition(grid, 1) == std::vector<std::size_t>{0, 8});
}

TEST_CASE("strict causality of fractional integrals") {
  const TimeGrid grid(1.0, 64);
  for (double g : {0.25, 0.5, 1.0}) {
    const auto rep = ops::is_strictly_causal(frac::left_frac_operator(g, grid), ops::Resolution::Forward, 1e-3);
    CHECK(rep.strictly_causal);
    REQUIRE_FALSE(rep.partition.empty());
    CHECK(rep.partition.front() == 0);
    CHECK(rep.partition.back() == 64);
    CHECK(rep.largest_block_norm < 1e-3);
  }
  const ops::DiscreteOperator I(grid, Matrix::identity(64));
  const auto rep = ops::is_strictly_causal(I, ops::Resolution::Forward, 1e-3);
  CHECK_FALSE(rep.strictly_causal);
  CHECK(rep.partition.empty());
  CHECK(rep.largest_block_norm == doctest::Approx(1.0));
}

TEST_CASE("traces of powers vanish for strictly lower operators") {
  const TimeGrid grid(1.0, 32);
  const auto tp = ops::trace_powers(frac::left_frac_operator(0.6, grid), 10);
  REQUIRE(tp.size() == 10);
  for (double v : tp) CHECK(v == 0.0);
  const ops::DiscreteOperator I(grid, Matrix::identity(32));
  CHECK(ops::trace(I) == 32.0);
}

TEST_CASE("ideal property and cyclic trace") {
  std::mt19937_64 gen(3);
  const std::size_t n = 10;
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix A = random_matrix(n, gen, 0);   // causal
    const Matrix B = random_matrix(n, gen, -1);  // strictly causal
    CHECK(std::abs(trace(multiply(A, B))) <= 1e-12);
    CHECK(std::abs(trace(multiply(B, A))) <= 1e-12);
    const Matrix R = random_matrix(n, gen, 1);
    const double t1 = trace(multiply(R, multiply(A, B)));
    const double t2 = trace(multiply(B, multiply(R, A)));
    CHECK(t1 == doctest::Approx(t2).epsilon(1e-12));
  }
}

TEST_CASE("operator csv is deterministic") {
  const TimeGrid grid(1.0, 4);
  const auto L = frac::left_frac_operator(0.5, grid);
  std::ostringstream a, b;
  ops::write_operator_csv(a, L);
  ops::write_operator_csv(b, L);
  CHECK(a.str() == b.str());
  CHECK_FALSE(a.str().empty());
}

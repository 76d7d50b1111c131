#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "volterra/fractional_calculus.hpp"
#include "volterra/rng.hpp"
#include "volterra/volterra_process.hpp"

using namespace volterra;

TEST_CASE("philox known answers") {
  // Random123 reference vectors for philox4x32-10
  const auto z = rng::philox4x32_10({0, 0, 0, 0}, {0, 0});
  CHECK(z == rng::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  const auto f = rng::philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                    {0xffffffffu, 0xffffffffu});
  CHECK(f == rng::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
}

TEST_CASE("normals are a pure function of the tuple") {
  CHECK(rng::standard_normal(42, 3, 17, 0) == rng::standard_normal(42, 3, 17, 0));
  CHECK(rng::standard_normal(42, 3, 17, 0) != rng::standard_normal(42, 3, 17, 1));
  CHECK(rng::standard_normal(42, 3, 17, 0) != rng::standard_normal(42, 4, 17, 0));
  CHECK(rng::standard_normal(42, 3, 17, 0) != rng::standard_normal(43, 3, 17, 0));

  const std::size_t N = 100000;
  double s = 0.0, s2 = 0.0, umin = 1.0, umax = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double z = rng::standard_normal(1, 0, i, 0);
    s += z;
    s2 += z * z;
    const double u = rng::uniform01(1, 0, i, 0);
    umin = std::min(umin, u);
    umax = std::max(umax, u);
  }
  CHECK(std::abs(s / N) < 4.0 / std::sqrt(double(N)));
  CHECK(std::abs(s2 / N - 1.0) < 4.0 * std::sqrt(2.0 / N));
  CHECK(umin >= 0.0);
  CHECK(umax < 1.0);
}

TEST_CASE("integrability exponents") {
  CHECK(process::integrability_p(0.75) == 10.0);
  CHECK(process::holder_eta(0.75) == doctest::Approx(0.15));
  CHECK(process::integrability_p(0.7) == 12.0);
  CHECK(process::holder_eta(0.9) > 0.0);
}

TEST_CASE("levy model") {
  const TimeGrid grid(1.0, 64);
  const auto m = process::make_levy_model(0.75, grid);
  CHECK(ops::is_causal(m.V, ops::Resolution::Reversed).causal);
  CHECK(ops::is_causal(m.Vcheck, ops::Resolution::Forward).causal);
  // reversed Levy operator is the left fractional integral of order H - 1/2
  CHECK(max_abs_diff(m.Vcheck.M, frac::left_frac_matrix(0.25, grid)) <= 1e-12);
  CHECK(m.G.rows() == 65);
  CHECK(m.G.cols() == 64);
  for (std::size_t j = 0; j < 64; ++j) CHECK(m.G(0, j) == 0.0);
  CHECK(m.p == 10.0);
}

TEST_CASE("indicator table round trip") {
  const TimeGrid grid(1.0, 32);
  const auto V = process::build_levy_operator(0.7, grid);
  const Matrix G = process::indicator_column_table(V);
  const auto back = process::operator_from_indicator_table(G, grid);
  CHECK(max_abs_diff(back.M, V.M) <= 1e-14);
}

TEST_CASE("stationary covariance") {
  const double H = 0.7;
  const TimeGrid grid(1.0, 256);
  const auto m = process::make_stationary_model(H, grid);
  const Matrix C = process::covariance_gram(m);
  const double cH = process::stationary_fbm_variance_constant(H);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i <= 256; i += 4)
    for (std::size_t k = 0; k <= 256; k += 4) {
      const double s = grid.node(i), t = grid.node(k);
      const double R = 0.5 * cH * (std::pow(s, 2 * H) + std::pow(t, 2 * H) - std::pow(std::abs(t - s), 2 * H));
      num = std::max(num, std::abs(C(i, k) - R));
      den = std::max(den, std::abs(R));
    }
  CHECK(num / den < 2e-2);
  // table row at T against the kernel at a cell centre
  const std::size_t j = 128;
  CHECK(m.G(256, j) == doctest::Approx(frac::kernel_KH(H, 1.0, grid.cell_mid(j))).epsilon(1e-2));
}

TEST_CASE("multifractional with a constant Hurst function") {
  const TimeGrid grid(1.0, 128);
  const auto spec = frac::HurstSpec::varying_fn([](double) { return 0.7; }, 0.6);
  const auto mf = process::make_multifractional_model(spec, grid);
  const Matrix C = process::covariance_gram(mf);
  const double cH = process::stationary_fbm_variance_constant(0.7);
  // normwise: the first cell of each row carries the kernel singularity, so
  // relative errors at small t are larger
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i <= 128; ++i) {
    const double R = cH * std::pow(grid.node(i), 1.4);
    num = std::max(num, std::abs(C(i, i) - R));
    den = std::max(den, R);
  }
  CHECK(num / den < 5e-2);
  const auto st = process::make_stationary_model(0.7, grid);
  CHECK(std::abs(C(128, 128) - process::covariance_gram(st)(128, 128)) / den < 5e-2);
}

TEST_CASE("drivers") {
  const TimeGrid grid(2.0, 100);
  const auto a = process::make_driver(5, 1, grid);
  const auto b = process::make_driver(5, 1, grid);
  CHECK(a.increments == b.increments);
  CHECK(a.increments != process::make_driver(5, 2, grid).increments);
  const auto r = process::reversed_driver(a);
  CHECK(r.reversed);
  CHECK(r.inc(0) == a.inc(99));
  CHECK(process::reversed_driver(r).increments == a.increments);
  const auto B = a.cumulative();
  CHECK(B.at(0) == 0.0);
  CHECK(B.at(100) == doctest::Approx(B.at(99) + a.inc(99)));

  const auto d2 = process::make_driver(5, 1, grid, 2);
  CHECK(d2.increments.size() == 200);
  CHECK(d2.inc(3, 0) == a.inc(3));
}

TEST_CASE("sample path uses the table") {
  const TimeGrid grid(1.0, 64);
  const auto m = process::make_levy_model(0.8, grid);
  const auto d = process::make_driver(9, 0, grid);
  const auto W = process::sample_path(m, d);
  CHECK(W.at(0) == 0.0);
  double w = 0.0;
  for (std::size_t j = 0; j < 64; ++j) w += m.G(40, j) * d.inc(j);
  CHECK(W.at(40) == doctest::Approx(w).epsilon(1e-14));
}

TEST_CASE("hoelder estimate tracks H") {
  const TimeGrid grid(1.0, 512);
  for (double H : {0.6, 0.9}) {
    const auto m = process::make_levy_model(H, grid);
    double sum = 0.0;
    for (std::uint32_t p = 0; p < 20; ++p) sum += process::holder_exponent_estimate(process::sample_path(m, process::make_driver(1, p, grid)));
    CHECK(std::abs(sum / 20.0 - H) < 0.12);
  }
}

TEST_CASE("gram csv header") {
  const TimeGrid grid(1.0, 16);
  const auto m = process::make_levy_model(0.75, grid);
  std::ostringstream os;
  process::write_gram_csv(os, process::covariance_gram(m), 0.75);
  CHECK_FALSE(os.str().empty());
}

TEST_CASE("multifractional table against the factorized one") {
  // two independent constructions; they agree to quadrature accuracy only
  const TimeGrid grid(1.0, 128);
  const auto flat = frac::HurstSpec::varying_fn([](double) { return 0.75; }, 0.6);
  const Matrix A = process::multifractional_indicator_table(flat, grid);
  const Matrix B = process::KH_indicator_table(0.75, grid);
  double worst = 0.0;
  for (std::size_t i = 1; i <= 128; ++i)
    for (std::size_t j = 0; j < i; ++j) worst = std::max(worst, std::abs(A(i, j) - B(i, j)) / std::abs(B(i, j)));
  CHECK(worst < 1e-3);

  // row i reads the kernel at the right end of each cell
  const auto affine = frac::HurstSpec::varying_fn([](double t) { return 0.6 + 0.2 * t; }, 0.55);
  const Matrix C = process::multifractional_indicator_table(affine, grid);
  CHECK(C(128, 63) == doctest::Approx(frac::kernel_KH(0.8, 1.0, 0.5)).epsilon(1e-14));
}

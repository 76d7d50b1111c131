#include "volterra/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace volterra {

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;  // triangular operators are half zeros
      auto bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw std::invalid_argument("multiply: vector length mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ai = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += ai[j] * x[j];
    y[i] = s;
  }
  return y;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("subtract: shape mismatch");
  Matrix c(a.rows(), a.cols());
  for (std::size_t k = 0; k < a.data().size(); ++k) c.data()[k] = a.data()[k] - b.data()[k];
  return c;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k)
    m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

double trace(const Matrix& a) {
  const std::size_t n = std::min(a.rows(), a.cols());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a(i, i);
  return s;
}

double spectral_norm(const Matrix& a, int max_iter, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  if (max_abs(a) == 0.0) return 0.0;
  // Deterministic start vector with no zero entries.
  std::vector<double> x(a.cols());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = 1.0 + 0.01 * static_cast<double>(j % 7);
  double sigma = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    double nx = 0.0;
    for (double v : x) nx += v * v;
    nx = std::sqrt(nx);
    if (nx == 0.0) return 0.0;
    for (double& v : x) v /= nx;
    std::vector<double> y = multiply(a, x);
    std::vector<double> z(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      auto ai = a.row(i);
      for (std::size_t j = 0; j < a.cols(); ++j) z[j] += ai[j] * y[i];
    }
    double ny = 0.0;
    for (double v : y) ny += v * v;
    const double next = std::sqrt(ny);
    // z = A^T A x; residual of the Rayleigh pair
    double res = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double r = z[j] - next * next * x[j];
      res += r * r;
    }
    res = std::sqrt(res);
    x = std::move(z);
    const bool converged = std::abs(next - sigma) <= tol * std::max(1.0, next) ||
                           res <= tol * std::max(1.0, next * next);
    sigma = next;
    if (converged) break;
  }
  return sigma;
}

}  // namespace volterra

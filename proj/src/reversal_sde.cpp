#include "volterra/reversal_sde.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <ostream>
#include <random>
#include <sstream>

#include "volterra/format.hpp"
#include "volterra/parallel.hpp"
#include "volterra/rng.hpp"

namespace volterra::sde {

namespace {

constexpr double kBlowUp = 1e12;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

const process::VolterraModel& model_of(const SdeProblem& p) {
  if (!p.model) throw std::invalid_argument("SdeProblem: model is not set");
  return *p.model;
}

void check_shapes(const SdeProblem& p, std::size_t t, std::span<const double> x) {
  const auto& m = model_of(p);
  if (p.dim == 0) throw std::invalid_argument("SdeProblem: dim must be positive");
  if (!p.sigma) throw std::invalid_argument("SdeProblem: sigma is not set");
  if (x.size() != p.dim) throw std::invalid_argument("SdeProblem: state has the wrong dimension");
  if (t > m.grid.n) throw std::invalid_argument("SdeProblem: horizon beyond the grid");
}

// V-check restricted to [0,t] must be lower triangular, i.e. V upper triangular there.
void require_causal_block(const process::VolterraModel& m, std::size_t t) {
  if (m.V.causal_reversed == ops::Tri::yes) return;
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (m.V.M(i, j) != 0.0)
        throw ContractViolation("solve_reversed_euler: reversed operator is not forward-causal on the horizon");
}

SdeProblem scalar_problem(std::shared_ptr<const process::VolterraModel> model, double x0, Field sigma,
                          Field sigma_prime, double L, double c) {
  SdeProblem p;
  p.dim = 1;
  p.sigma = std::move(sigma);
  p.sigma_prime = std::move(sigma_prime);
  p.x0 = {x0};
  p.model = std::move(model);
  p.lipschitz = L;
  p.sublinear = c;
  return p;
}

}  // namespace

SdeProblem zero_problem(std::shared_ptr<const process::VolterraModel> model, double x0) {
  return scalar_problem(
      std::move(model), x0, [](std::span<const double>, std::span<double> out) { out[0] = 0.0; },
      [](std::span<const double>, std::span<double> out) { out[0] = 0.0; }, 0.0, 0.0);
}

SdeProblem additive_problem(std::shared_ptr<const process::VolterraModel> model, double a, double x0) {
  return scalar_problem(
      std::move(model), x0, [a](std::span<const double>, std::span<double> out) { out[0] = a; },
      [](std::span<const double>, std::span<double> out) { out[0] = 0.0; }, 0.0, std::abs(a));
}

SdeProblem linear_problem(std::shared_ptr<const process::VolterraModel> model, double a, double x0) {
  return scalar_problem(
      std::move(model), x0, [a](std::span<const double> x, std::span<double> out) { out[0] = a * x[0]; },
      [a](std::span<const double>, std::span<double> out) { out[0] = a; }, std::abs(a), std::abs(a));
}

void validate_problem(const SdeProblem& problem) {
  const auto& m = model_of(problem);
  const std::size_t d = problem.dim;
  check_shapes(problem, m.grid.n, problem.x0);
  require_causal_block(m, m.grid.n);
  std::mt19937_64 gen(0x5eedULL);
  std::uniform_real_distribution<double> box(-10.0, 10.0);
  std::vector<double> x(d), y(d), sx(d * d), sy(d * d);
  for (int k = 0; k < 1000; ++k) {
    for (auto& v : x) v = box(gen);
    problem.sigma(x, sx);
    const double bound = problem.sublinear * (1.0 + norm(x));
    if (norm(sx) > bound * (1.0 + 1e-12) + 1e-300) {
      std::ostringstream msg;
      msg << "validate_problem: |sigma(x)| = " << norm(sx) << " exceeds c(1+|x|) = " << bound;
      throw std::invalid_argument(msg.str());
    }
  }
  for (int k = 0; k < 1000; ++k) {
    for (auto& v : x) v = box(gen);
    for (auto& v : y) v = box(gen);
    problem.sigma(x, sx);
    problem.sigma(y, sy);
    double diff = 0.0, dist = 0.0;
    for (std::size_t i = 0; i < d * d; ++i) diff += (sx[i] - sy[i]) * (sx[i] - sy[i]);
    for (std::size_t i = 0; i < d; ++i) dist += (x[i] - y[i]) * (x[i] - y[i]);
    diff = std::sqrt(diff);
    dist = std::sqrt(dist);
    if (diff > problem.lipschitz * dist * (1.0 + 1e-9) + 1e-12) {
      std::ostringstream msg;
      msg << "validate_problem: Lipschitz ratio " << diff / dist << " exceeds L = " << problem.lipschitz;
      throw std::invalid_argument(msg.str());
    }
  }
}

std::vector<double> reversed_increments(const process::BrownianDriver& driver, std::size_t t) {
  if (t > driver.grid.n) throw std::invalid_argument("reversed_increments: horizon beyond the grid");
  const std::size_t d = driver.dim;
  std::vector<double> out(t * d);
  for (std::size_t k = 0; k < t; ++k)
    for (std::size_t c = 0; c < d; ++c) out[k * d + c] = driver.inc(t - 1 - k, c);
  return out;
}

EulerPath solve_reversed_euler_increments(const SdeProblem& problem, std::size_t t, std::span<const double> dBr,
                                          std::span<const double> x, std::size_t steps, CausalityAudit* audit) {
  check_shapes(problem, t, x);
  const auto& m = model_of(problem);
  const std::size_t d = problem.dim, d2 = d * d;
  if (dBr.size() != t * d) throw std::invalid_argument("solve_reversed_euler: need t x d reversed increments");
  const std::size_t K = steps == kAllSteps ? t : steps;
  if (K > t) throw std::invalid_argument("solve_reversed_euler: more steps than the horizon");
  require_causal_block(m, t);

  EulerPath out;
  out.horizon = t;
  out.steps = K;
  out.dim = d;
  out.Z.assign((K + 1) * d, 0.0);
  out.completion.assign(d, 0.0);
  std::copy(x.begin(), x.end(), out.Z.begin());

  // sigma values by slot, zero-padded beyond the current step
  std::vector<double> buf(t * d2, 0.0);
  std::vector<double> phi(d2);
  if (audit) {
    audit->max_index_read.assign(K, kNone);
    audit->future_reads = 0;
    audit->total_reads = 0;
  }

  // row k of V-check at horizon t is row t-1-k of V read backwards
  auto apply_row = [&](std::size_t k, bool record) {
    std::fill(phi.begin(), phi.end(), 0.0);
    auto row = m.V.M.row(t - 1 - k);
    for (std::size_t l = 0; l < t; ++l) {
      const double c = row[t - 1 - l];
      if (c == 0.0) continue;
      if (record && audit) {
        ++audit->total_reads;
        if (l > k) ++audit->future_reads;
        auto& mx = audit->max_index_read[k];
        mx = mx == kNone ? l : std::max(mx, l);
      }
      const double* s = buf.data() + l * d2;
      for (std::size_t q = 0; q < d2; ++q) phi[q] += c * s[q];
    }
  };

  for (std::size_t k = 0; k < K; ++k) {
    std::span<const double> zk(out.Z.data() + k * d, d);
    problem.sigma(zk, std::span<double>(buf.data() + k * d2, d2));
    apply_row(k, true);
    double* next = out.Z.data() + (k + 1) * d;
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += phi[i * d + j] * dBr[k * d + j];
      next[i] = zk[i] - s;
      if (!std::isfinite(next[i]) || std::abs(next[i]) > kBlowUp) {
        std::ostringstream msg;
        msg << "solve_reversed_euler: state left [-1e12,1e12] at step " << (k + 1) << " of " << K;
        throw DivergenceError(msg.str());
      }
    }
  }

  // terms that the truncated window drops: sigma frozen on [0,K), read at k >= K
  for (std::size_t k = K; k < t; ++k) {
    apply_row(k, false);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out.completion[i] += phi[i * d + j] * dBr[k * d + j];
  }
  return out;
}

EulerPath solve_reversed_euler(const SdeProblem& problem, std::size_t t, const process::BrownianDriver& driver,
                               std::span<const double> x, std::size_t steps, CausalityAudit* audit) {
  const auto& m = model_of(problem);
  if (!(driver.grid == m.grid) || driver.dim != problem.dim)
    throw std::invalid_argument("solve_reversed_euler: driver does not match the problem");
  const auto dBr = reversed_increments(driver, t);
  return solve_reversed_euler_increments(problem, t, dBr, x, steps, audit);
}

std::vector<double> reconstruct_Y(const SdeProblem& problem, const process::BrownianDriver& driver, std::size_t r,
                                  std::size_t t, std::span<const double> x) {
  if (r > t) throw std::invalid_argument("reconstruct_Y: need r <= t");
  const EulerPath p = solve_reversed_euler(problem, t, driver, x, t - r);
  std::vector<double> y(p.state(p.steps).begin(), p.state(p.steps).end());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= p.completion[i];
  return y;
}

namespace {

constexpr std::size_t kMaxIter = 200;

InversionResult invert_scalar(const std::function<double(double)>& Y, double x) {
  const double tol = 1e-8 * (1.0 + std::abs(x));
  const double polish = 1e-15 * (1.0 + std::abs(x));
  std::size_t evals = 0;
  auto f = [&](double y) {
    ++evals;
    return Y(y) - x;
  };
  double best = x, fbest = f(x);
  if (std::abs(fbest) <= polish) return {{best}, std::abs(fbest), evals};

  double step = 1.0 + std::abs(x);
  double lo = x - step, hi = x + step;
  double flo = f(lo), fhi = f(hi);
  int expansions = 0;
  while ((flo > 0) == (fhi > 0) && flo != 0.0 && fhi != 0.0) {
    if (++expansions > 60) {
      std::ostringstream msg;
      msg << "invert_flow: no sign change on [" << lo << ", " << hi << "] for target " << x;
      throw InversionError(msg.str());
    }
    step *= 2.0;
    lo = x - step;
    hi = x + step;
    flo = f(lo);
    fhi = f(hi);
  }
  if (std::abs(flo) < std::abs(fbest)) best = lo, fbest = flo;
  if (std::abs(fhi) < std::abs(fbest)) best = hi, fbest = fhi;

  // Illinois variant of regula falsi, halving the stale end's value
  int side = 0;
  for (std::size_t it = 0; it < kMaxIter && std::abs(fbest) > polish; ++it) {
    double mid = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(mid > std::min(lo, hi) && mid < std::max(lo, hi))) mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) < std::abs(fbest)) best = mid, fbest = fm;
    if (fm == 0.0 || std::abs(hi - lo) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(mid)) break;
    if ((fm > 0) == (fhi > 0)) {
      hi = mid;
      fhi = fm;
      if (side == 1) flo *= 0.5;
      side = 1;
    } else {
      lo = mid;
      flo = fm;
      if (side == -1) fhi *= 0.5;
      side = -1;
    }
  }
  if (std::abs(fbest) > tol) {
    std::ostringstream msg;
    msg << "invert_flow: residual " << std::abs(fbest) << " above " << tol << " after " << evals
        << " evaluations, last bracket [" << lo << ", " << hi << "]";
    throw InversionError(msg.str());
  }
  return {{best}, std::abs(fbest), evals};
}

// Gaussian elimination with partial pivoting; false when singular.
bool solve_dense(std::vector<double> A, std::vector<double>& b, std::size_t d) {
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < d; ++r)
      if (std::abs(A[r * d + c]) > std::abs(A[piv * d + c])) piv = r;
    if (A[piv * d + c] == 0.0) return false;
    if (piv != c) {
      for (std::size_t k = 0; k < d; ++k) std::swap(A[c * d + k], A[piv * d + k]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < d; ++r) {
      const double f = A[r * d + c] / A[c * d + c];
      for (std::size_t k = c; k < d; ++k) A[r * d + k] -= f * A[c * d + k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = d; c-- > 0;) {
    double s = b[c];
    for (std::size_t k = c + 1; k < d; ++k) s -= A[c * d + k] * b[k];
    b[c] = s / A[c * d + c];
  }
  return true;
}

InversionResult invert_newton(const std::function<std::vector<double>(std::span<const double>)>& Y,
                              std::span<const double> x) {
  const std::size_t d = x.size();
  const double tol = 1e-8 * (1.0 + norm(x));
  auto resid = [&](std::span<const double> y) {
    auto v = Y(y);
    for (std::size_t i = 0; i < d; ++i) v[i] -= x[i];
    return v;
  };
  std::vector<double> y(x.begin(), x.end());
  std::vector<double> f = resid(y);
  double fn = norm(f);
  std::size_t it = 0;
  for (; it < kMaxIter && fn > tol; ++it) {
    std::vector<double> J(d * d);
    for (std::size_t k = 0; k < d; ++k) {
      std::vector<double> yp = y;
      const double h = 1e-7 * (1.0 + std::abs(y[k]));
      yp[k] += h;
      const auto fp = resid(yp);
      for (std::size_t i = 0; i < d; ++i) J[i * d + k] = (fp[i] - f[i]) / h;
    }
    std::vector<double> step = f;
    if (!solve_dense(J, step, d)) throw InversionError("invert_flow: singular finite-difference Jacobian");
    double lambda = 1.0;
    bool improved = false;
    for (int half = 0; half < 30; ++half, lambda *= 0.5) {
      std::vector<double> yn = y;
      for (std::size_t i = 0; i < d; ++i) yn[i] -= lambda * step[i];
      auto fnew = resid(yn);
      if (norm(fnew) < fn) {
        y = std::move(yn);
        f = std::move(fnew);
        fn = norm(f);
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (fn > tol) {
    std::ostringstream msg;
    msg << "invert_flow: Newton residual " << fn << " above " << tol << " after " << it << " iterations";
    throw InversionError(msg.str());
  }
  return {y, fn, it};
}

}  // namespace

InversionResult invert_flow(const SdeProblem& problem, const process::BrownianDriver& driver, std::size_t r,
                            std::size_t t, std::span<const double> x) {
  if (x.size() != problem.dim) throw std::invalid_argument("invert_flow: target has the wrong dimension");
  if (problem.dim == 1) {
    return invert_scalar(
        [&](double y) {
          const double v[1] = {y};
          return reconstruct_Y(problem, driver, r, t, v)[0];
        },
        x[0]);
  }
  return invert_newton([&](std::span<const double> y) { return reconstruct_Y(problem, driver, r, t, y); }, x);
}

FlowSolution solve_flow(const SdeProblem& problem, const process::BrownianDriver& driver) {
  const std::size_t n = model_of(problem).grid.n;
  FlowSolution s;
  s.driver = driver;
  s.reversed_driver = process::reversed_driver(driver);
  s.Z = solve_reversed_euler(problem, n, driver, problem.x0);
  s.Y.assign(s.Z.state(n).begin(), s.Z.state(n).end());
  const auto inv = invert_flow(problem, driver, 0, n, problem.x0);
  s.X = inv.y;
  s.inversion_residual = inv.residual;
  return s;
}

double check_flow_property(const SdeProblem& problem, const process::BrownianDriver& driver, std::size_t r,
                           std::size_t s, std::size_t t, std::span<const double> x) {
  if (!(r <= s && s <= t)) throw std::invalid_argument("check_flow_property: need r <= s <= t");
  const auto direct = reconstruct_Y(problem, driver, r, t, x);
  const auto inner = reconstruct_Y(problem, driver, s, t, x);
  const auto composed = reconstruct_Y(problem, driver, r, s, inner);
  double e = 0.0;
  for (std::size_t i = 0; i < direct.size(); ++i) e += (direct[i] - composed[i]) * (direct[i] - composed[i]);
  return std::sqrt(e);
}

AdaptednessAudit audit_adaptedness(const SdeProblem& problem, const process::BrownianDriver& driver, std::size_t t,
                                   std::size_t cut, std::uint64_t corruption_seed) {
  if (cut > t) throw std::invalid_argument("audit_adaptedness: cut beyond the horizon");
  const std::size_t d = problem.dim;
  AdaptednessAudit out;
  auto dBr = reversed_increments(driver, t);
  const EulerPath clean = solve_reversed_euler_increments(problem, t, dBr, problem.x0, kAllSteps, &out.causality);
  const double sd = std::sqrt(driver.grid.dt());
  for (std::size_t k = cut; k < t; ++k)
    for (std::size_t c = 0; c < d; ++c)
      dBr[k * d + c] = sd * rng::standard_normal(corruption_seed, 0xADu, k, static_cast<std::uint32_t>(c));
  const EulerPath dirty = solve_reversed_euler_increments(problem, t, dBr, problem.x0);
  const std::size_t prefix = (cut + 1) * d;
  out.prefix_identical = std::memcmp(clean.Z.data(), dirty.Z.data(), prefix * sizeof(double)) == 0;
  for (std::size_t i = prefix; i < clean.Z.size(); ++i)
    out.max_suffix_change = std::max(out.max_suffix_change, std::abs(clean.Z[i] - dirty.Z[i]));
  return out;
}

double additive_increment_variance(const SdeProblem& problem, std::size_t v, std::size_t v2) {
  const auto& m = model_of(problem);
  if (problem.dim != 1) throw std::invalid_argument("additive_increment_variance: scalar problems only");
  const std::size_t n = m.grid.n;
  if (!(v <= v2 && v2 <= n)) throw std::invalid_argument("additive_increment_variance: need v <= v2 <= n");
  double a = 0.0;
  problem.sigma(problem.x0, std::span<double>(&a, 1));
  double s = 0.0;
  for (std::size_t k = v; k < v2; ++k) {
    auto row = m.V.M.row(n - 1 - k);
    double phi = 0.0;
    for (std::size_t l = 0; l <= k; ++l) phi += row[n - 1 - l];
    s += a * a * phi * phi;
  }
  return m.grid.dt() * s;
}

namespace {

struct PathMoments {
  std::vector<double> at;   // |Z_v(x)|^p by (x, v) slot
  std::vector<double> inc;  // per lag, mean over base points
};

void mean_se(const std::vector<PathMoments>& per, std::size_t slot, bool increments, double& mean, double& se) {
  const std::size_t N = per.size();
  double s = 0.0, s2 = 0.0;
  for (const auto& pm : per) {
    const double v = increments ? pm.inc[slot] : pm.at[slot];
    s += v;
  }
  mean = s / static_cast<double>(N);
  for (const auto& pm : per) {
    const double v = (increments ? pm.inc[slot] : pm.at[slot]) - mean;
    s2 += v * v;
  }
  se = N > 1 ? std::sqrt(s2 / static_cast<double>(N - 1) / static_cast<double>(N)) : 0.0;
}

}  // namespace

MomentReport moment_and_continuity_report(const SdeProblem& problem, const MomentConfig& cfg) {
  const auto& m = model_of(problem);
  const std::size_t n = m.grid.n, d = problem.dim;
  if (cfg.paths == 0) throw std::invalid_argument("moment_and_continuity_report: need at least one path");
  MomentReport rep;
  rep.p = cfg.p > 0 ? cfg.p : m.p;
  rep.eta = m.eta;
  const double p = rep.p;

  std::vector<std::vector<double>> xs;
  if (cfg.xs.empty()) {
    xs.push_back(problem.x0);
  } else {
    for (double v : cfg.xs) xs.push_back(std::vector<double>(d, v));
  }
  const std::vector<std::size_t> vs = {0, n / 4, n / 2, 3 * n / 4, n};
  const std::vector<std::size_t> bases = {0, n / 4, n / 2, 3 * n / 4};
  std::vector<std::size_t> lags;
  for (std::size_t h = 1; 4 * h <= n; h *= 2) lags.push_back(h);

  std::vector<PathMoments> per(cfg.paths);
  parallel_for(cfg.paths, cfg.threads, [&](std::size_t i) {
    const auto drv = process::make_driver(cfg.seed, static_cast<std::uint32_t>(i), m.grid, d);
    PathMoments pm;
    pm.at.resize(xs.size() * vs.size());
    std::vector<double> dz(d);
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      const EulerPath z = solve_reversed_euler(problem, n, drv, xs[ix]);
      for (std::size_t iv = 0; iv < vs.size(); ++iv) pm.at[ix * vs.size() + iv] = std::pow(norm(z.state(vs[iv])), p);
      if (ix != 0) continue;
      for (std::size_t h : lags) {
        double acc = 0.0;
        std::size_t cnt = 0;
        for (std::size_t b : bases) {
          if (b + h > n) continue;
          for (std::size_t c = 0; c < d; ++c) dz[c] = z.state(b + h)[c] - z.state(b)[c];
          acc += std::pow(norm(dz), p);
          ++cnt;
        }
        pm.inc.push_back(acc / static_cast<double>(cnt));
      }
    }
    per[i] = std::move(pm);
  });

  for (std::size_t ix = 0; ix < xs.size(); ++ix)
    for (std::size_t iv = 0; iv < vs.size(); ++iv) {
      MomentRow row;
      row.v = vs[iv];
      row.x = xs[ix][0];
      mean_se(per, ix * vs.size() + iv, false, row.moment, row.se);
      rep.moments.push_back(row);
    }

  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < lags.size(); ++k) {
    IncrementRow row;
    row.lag = lags[k];
    row.h = static_cast<double>(lags[k]) * m.grid.dt();
    mean_se(per, k, true, row.moment, row.se);
    if (cfg.additive_oracle) {
      double acc = 0.0;
      std::size_t cnt = 0;
      for (std::size_t b : bases) {
        if (b + lags[k] > n) continue;
        acc += additive_increment_variance(problem, b, b + lags[k]);
        ++cnt;
      }
      row.oracle = acc / static_cast<double>(cnt);
    }
    if (row.moment > 0.0) {
      lx.push_back(std::log(row.h));
      ly.push_back(std::log(row.moment));
    }
    rep.increments.push_back(row);
  }

  if (lx.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) mx += lx[k], my += ly[k];
    mx /= static_cast<double>(lx.size());
    my /= static_cast<double>(lx.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) sxy += (lx[k] - mx) * (ly[k] - my), sxx += (lx[k] - mx) * (lx[k] - mx);
    rep.fitted_slope = sxy / sxx;
    rep.fitted_exponent = rep.fitted_slope / p;
  } else {
    rep.fitted_slope = rep.fitted_exponent = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

std::vector<double> pathwise_backward_Y(const SdeProblem& problem, const process::BrownianDriver& driver,
                                        std::size_t r, std::size_t t, std::span<const double> x) {
  const auto& m = model_of(problem);
  check_shapes(problem, t, x);
  if (r > t) throw std::invalid_argument("pathwise_backward_Y: need r <= t");
  const std::size_t d = problem.dim;
  const NodePath W = process::sample_path(m, driver);
  std::vector<double> y(x.begin(), x.end()), s(d * d), next(d);
  for (std::size_t rho = t; rho-- > r;) {
    problem.sigma(y, s);
    for (std::size_t i = 0; i < d; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) acc += s[i * d + j] * (W.at(rho + 1, j) - W.at(rho, j));
      next[i] = y[i] - acc;
    }
    y = next;
  }
  return y;
}

void write_trajectory_csv(std::ostream& os, const EulerPath& path, const TimeGrid& grid) {
  os << "v";
  if (path.dim == 1) {
    os << ",Z";
  } else {
    for (std::size_t c = 0; c < path.dim; ++c) os << ",Z_" << c;
  }
  os << "\n";
  for (std::size_t k = 0; k <= path.steps; ++k) {
    os << format_double(grid.node(k));
    for (double v : path.state(k)) os << ',' << format_double(v);
    os << "\n";
  }
}

}  // namespace volterra::sde

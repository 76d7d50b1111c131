#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "volterra/volterra_process.hpp"

namespace volterra::sde {

// Diffusion field: writes the d x d matrix sigma(x) row-major into out.
using Field = std::function<void(std::span<const double> x, std::span<double> out)>;

struct SdeProblem {
  std::size_t dim = 1;
  Field sigma;
  Field sigma_prime;  // optional, d x d x d with out[(i*d + j)*d + k] = d sigma_ij / d x_k
  std::vector<double> x0;
  std::shared_ptr<const process::VolterraModel> model;
  double lipschitz = 1.0;
  double sublinear = 1.0;
};

// Scalar problems on a shared model.
SdeProblem zero_problem(std::shared_ptr<const process::VolterraModel> model, double x0);
SdeProblem additive_problem(std::shared_ptr<const process::VolterraModel> model, double a, double x0);
SdeProblem linear_problem(std::shared_ptr<const process::VolterraModel> model, double a, double x0);

// Samples growth on 1000 points of [-10,10]^d and Lipschitz ratios on 1000 random
// pairs; throws std::invalid_argument when a declared constant is exceeded.
void validate_problem(const SdeProblem& problem);

struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InversionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Which buffer slots the operator application read at each Euler step.
struct CausalityAudit {
  std::vector<std::size_t> max_index_read;  // per step; npos when nothing was read
  std::size_t future_reads = 0;             // reads of slot l > k at step k
  std::size_t total_reads = 0;
};

// Euler states at one horizon t (node index), reversed time v = 0..steps.
struct EulerPath {
  std::size_t horizon = 0;
  std::size_t steps = 0;
  std::size_t dim = 1;
  std::vector<double> Z;           // (steps+1) x dim
  std::vector<double> completion;  // dim; reversed-driver terms after `steps`, see reconstruct_Y

  std::span<const double> state(std::size_t k) const { return {Z.data() + k * dim, dim}; }
};

inline constexpr std::size_t kAllSteps = std::numeric_limits<std::size_t>::max();

// dB-check at horizon t: increment k is dB_{t-1-k}, k = 0..t-1 (t x dim).
std::vector<double> reversed_increments(const process::BrownianDriver& driver, std::size_t t);

// Left-point Euler scheme against the reversed driver with the reversed operator
// restricted to [0,t]. `steps` defaults to t. The completion term is filled when
// steps < t.
EulerPath solve_reversed_euler(const SdeProblem& problem, std::size_t t, const process::BrownianDriver& driver,
                               std::span<const double> x, std::size_t steps = kAllSteps,
                               CausalityAudit* audit = nullptr);
EulerPath solve_reversed_euler_increments(const SdeProblem& problem, std::size_t t, std::span<const double> dBr,
                                          std::span<const double> x, std::size_t steps = kAllSteps,
                                          CausalityAudit* audit = nullptr);

// Y_{r,t}(x) = Z_{t-r} minus the completion sum over reversed steps t-r..t-1.
std::vector<double> reconstruct_Y(const SdeProblem& problem, const process::BrownianDriver& driver, std::size_t r,
                                  std::size_t t, std::span<const double> x);

struct InversionResult {
  std::vector<double> y;
  double residual = 0.0;
  std::size_t iterations = 0;
};

// Solves Y_{r,t}(y) = x. Bracketed regula falsi for d = 1, damped Newton with a
// finite-difference Jacobian otherwise. Throws InversionError past 200 iterations.
InversionResult invert_flow(const SdeProblem& problem, const process::BrownianDriver& driver, std::size_t r,
                            std::size_t t, std::span<const double> x);

struct FlowSolution {
  EulerPath Z;           // horizon n from x0
  std::vector<double> Y;  // Y_{0,T}(x0)
  std::vector<double> X;  // X_{0,T}(x0)
  double inversion_residual = 0.0;
  process::BrownianDriver driver;
  process::BrownianDriver reversed_driver;
};

FlowSolution solve_flow(const SdeProblem& problem, const process::BrownianDriver& driver);

// |Y_{r,t}(x) - Y_{r,s}(Y_{s,t}(x))|, Euclidean norm.
double check_flow_property(const SdeProblem& problem, const process::BrownianDriver& driver, std::size_t r,
                           std::size_t s, std::size_t t, std::span<const double> x);

struct AdaptednessAudit {
  bool prefix_identical = false;  // Z_0..Z_cut bit-identical under corruption
  double max_suffix_change = 0.0;  // shows the corruption had an effect downstream
  CausalityAudit causality;
};

// Replaces reversed increments cut..t-1 with fresh draws and compares states.
AdaptednessAudit audit_adaptedness(const SdeProblem& problem, const process::BrownianDriver& driver, std::size_t t,
                                   std::size_t cut, std::uint64_t corruption_seed);

struct MomentRow {
  std::size_t v = 0;
  double x = 0.0;
  double moment = 0.0;
  double se = 0.0;
};

struct IncrementRow {
  std::size_t lag = 0;
  double h = 0.0;
  double moment = 0.0;  // mean over paths of the mean over base points of |dZ|^p
  double se = 0.0;
  double oracle = std::numeric_limits<double>::quiet_NaN();  // additive p = 2 only
};

struct MomentReport {
  double p = 0.0;
  double eta = 0.0;
  std::vector<MomentRow> moments;
  std::vector<IncrementRow> increments;
  double fitted_slope = 0.0;     // in log E|dZ|^p against log h
  double fitted_exponent = 0.0;  // slope / p
};

struct MomentConfig {
  std::size_t paths = 500;
  std::uint64_t seed = 0;
  double p = 0.0;  // 0 means the model's p
  std::vector<double> xs;  // empty means {x0}
  std::size_t threads = 1;
  bool additive_oracle = false;
};

MomentReport moment_and_continuity_report(const SdeProblem& problem, const MomentConfig& cfg);

// Variance of Z_{v2} - Z_v for a constant scalar sigma = a: dt * sum_{k in [v,v2)} phi_k^2.
double additive_increment_variance(const SdeProblem& problem, std::size_t v, std::size_t v2);

// Diagnostic only: backward pathwise Euler on W, Y <- Y - sigma(Y) dW over cells t-1..r.
std::vector<double> pathwise_backward_Y(const SdeProblem& problem, const process::BrownianDriver& driver,
                                        std::size_t r, std::size_t t, std::span<const double> x);

void write_trajectory_csv(std::ostream& os, const EulerPath& path, const TimeGrid& grid);

}  // namespace volterra::sde

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mkq/costs.hpp"
#include "mkq/grid.hpp"
#include "mkq/observations.hpp"

namespace mkq {

// Semi-discrete stochastic dual descent on v in R^n.

struct SemiDiscreteState {
  std::vector<double> v;
  std::size_t iter = 0;
  double epsilon = 0.0;  // 0 selects the unregularized subgradient
  double gamma = 1.0;
  double c_exponent = 0.75;

  double step_size() const;
};

/// v = 0 with the default schedule: gamma = eps, or 1 when eps = 0.
SemiDiscreteState semidiscrete_init(std::size_t n, double epsilon);
SemiDiscreteState semidiscrete_init(std::size_t n, double epsilon, double gamma, double c_exponent);

/// eps log( (1/n) sum_j exp((v_j - c(x, Y_j)) / eps) ) - mean(v); for eps = 0,
/// max_j (v_j - c(x, Y_j)) - mean(v).
double semidiscrete_integrand(std::span<const double> v, double epsilon, const Cost& cost, std::span<const double> x,
                              const ObservationSet& Y);

/// Gradient of the integrand in v: softmax - 1/n, or indicator - 1/n when eps = 0.
void semidiscrete_gradient(const SemiDiscreteState& state, const Cost& cost, std::span<const double> x,
                           const ObservationSet& Y, std::span<double> grad);

/// Index minimizing c(x, Y_j) - v_j, ties to the lowest index.
std::size_t semidiscrete_assign(std::span<const double> v, const Cost& cost, std::span<const double> x,
                                const ObservationSet& Y);

SemiDiscreteState semidiscrete_step(const SemiDiscreteState& state, const Cost& cost, std::span<const double> x,
                                    const ObservationSet& Y);

/// In-place variant; `scratch` must have length n.
void semidiscrete_step_inplace(SemiDiscreteState& state, const Cost& cost, std::span<const double> x,
                               const ObservationSet& Y, std::span<double> scratch);

/// Softmax-weighted average of observations. Throws for eps = 0.
std::vector<double> semidiscrete_map(const SemiDiscreteState& state, const Cost& cost, const ObservationSet& Y,
                                     std::span<const double> x);

// Log-domain Sinkhorn between the uniform measure on grid atoms and the
// empirical measure of Y.

struct SinkhornResult {
  std::vector<double> f;  // length p, on grid atoms
  std::vector<double> g;  // length n, on observations
  double epsilon = 0.0;
  std::size_t iterations = 0;
  double error = 0.0;     // row-marginal l-infinity error of the plan
  bool converged = false;
  std::vector<double> error_history;
};

class SinkhornSolver {
 public:
  SinkhornSolver(const Cost& cost, const GridSpec& grid, const ObservationSet& Y, double epsilon);

  /// Runs k full iterations (rows then columns); returns the error afterwards.
  double iterate(std::size_t k = 1);
  double error() const { return error_; }
  std::size_t iterations() const { return iters_; }
  const std::vector<double>& f() const { return f_; }
  const std::vector<double>& g() const { return g_; }
  /// Plan entries P_ij = exp((f_i + g_j - C_ij)/eps) / (p n).
  std::vector<double> plan() const;
  SinkhornResult result() const;

  std::size_t p() const { return p_; }
  std::size_t n() const { return n_; }

 private:
  std::size_t p_, n_;
  double eps_;
  std::vector<double> C_, f_, g_;
  std::size_t iters_ = 0;
  double error_ = 0.0;
  std::vector<double> history_;
};

/// Iterates until the marginal error drops below tol or max_iters is reached.
/// Non-convergence is reported in the result, not thrown.
SinkhornResult sinkhorn(const Cost& cost, const GridSpec& grid, const ObservationSet& Y, double epsilon, double tol,
                        std::size_t max_iters);

}  // namespace mkq

#pragma once

#include <memory>
#include <span>
#include <vector>

#include "mkq/costs.hpp"
#include "mkq/grid.hpp"
#include "mkq/observations.hpp"
#include "mkq/spectral.hpp"

namespace mkq {

/// Dual coefficients theta together with the regularization and cost they are
/// evaluated under. The potential u = IFFT(theta) is computed once at
/// construction; the state is immutable afterwards.
class DualState {
 public:
  DualState(CoefficientVector coeffs, double epsilon, Cost cost);

  static DualState zero(const GridSpec& grid, double epsilon, Cost cost);

  /// Builds a state whose potential is `u` verbatim. Used to evaluate the
  /// objective off the DC-pinned manifold (u may carry a nonzero mean).
  static DualState with_potential(FieldValues u, double epsilon, Cost cost);

  const CoefficientVector& coeffs() const { return coeffs_; }
  double epsilon() const { return epsilon_; }
  const Cost& cost() const { return costs_->cost(); }
  const GridSpec& grid() const { return costs_->grid(); }
  std::span<const double> potential() const { return u_; }
  const CostEvaluator& costs() const { return *costs_; }

 private:
  DualState() = default;

  CoefficientVector coeffs_;
  double epsilon_ = 1.0;
  std::shared_ptr<const CostEvaluator> costs_;
  std::vector<double> u_;
};

/// Result of one pass over exp((u - c)/eps): the normalized density (if
/// requested) and log of the grid mean of the unnormalized exponentials.
struct GibbsEval {
  double log_mean = 0.0;
};

/// F = exp((u - c)/eps) / mean(exp((u - c)/eps)). `F` may be empty.
GibbsEval evaluate_gibbs(std::span<const double> u, std::span<const double> c, double eps, std::span<double> F);

FieldValues gibbs_density(const DualState& state, std::span<const double> y);

/// h_eps(theta, y) = eps log mean exp((u - c(., y))/eps) + eps
double sample_objective(const DualState& state, std::span<const double> y);

/// Fourier coefficients of the Gibbs density, DC pinned.
CoefficientVector stochastic_gradient(const DualState& state, std::span<const double> y);

/// u^{c,eps}(y) = -eps log mean exp((u - c(., y))/eps)
double smooth_c_transform(const DualState& state, std::span<const double> y);

/// D h_eps(theta, y)[tau] = mean(F S) with S = IFFT(tau).
double directional_derivative(const DualState& state, std::span<const double> y, const CoefficientVector& tau);

/// D^2 h_eps(theta, y)[tau, tau] = Var_F(S) / eps.
double hessian_quadratic_form(const DualState& state, std::span<const double> y, const CoefficientVector& tau);

/// (1/eps)(2 - avg_j mean(F_{theta, Y_j}^2)).
double convexity_certificate(const DualState& state, const ObservationSet& sample);

/// (1/eps)(2 - m2) for an already averaged second moment m2 of the Gibbs densities.
inline double convexity_bound(double eps, double mean_second_moment) { return (2.0 - mean_second_moment) / eps; }

/// g(x) = (1 - exp(-x)) / x, with g(0) = 1.
double self_concordance_g(double x);

}  // namespace mkq

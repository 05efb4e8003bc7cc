#include "mkq/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mkq/kernels.hpp"

namespace mkq {

double SemiDiscreteState::step_size() const { return gamma * std::pow(static_cast<double>(iter + 1), -c_exponent); }

SemiDiscreteState semidiscrete_init(std::size_t n, double epsilon) {
  return semidiscrete_init(n, epsilon, epsilon > 0.0 ? epsilon : 1.0, 0.75);
}

SemiDiscreteState semidiscrete_init(std::size_t n, double epsilon, double gamma, double c_exponent) {
  if (n == 0) throw std::invalid_argument("semi-discrete: empty observation set");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon: must be >= 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma: must be positive");
  if (!(c_exponent > 0.5 && c_exponent <= 1.0)) throw std::invalid_argument("c_exponent: must lie in (1/2, 1]");
  SemiDiscreteState s;
  s.v.assign(n, 0.0);
  s.epsilon = epsilon;
  s.gamma = gamma;
  s.c_exponent = c_exponent;
  return s;
}

double semidiscrete_integrand(std::span<const double> v, double epsilon, const Cost& cost, std::span<const double> x,
                              const ObservationSet& Y) {
  const std::size_t n = Y.size();
  double m = -std::numeric_limits<double>::infinity();
  std::vector<double> z(n);
  for (std::size_t j = 0; j < n; ++j) {
    z[j] = v[j] - cost(x, Y[j]);
    m = std::max(m, z[j]);
  }
  double mean_v = 0.0;
  for (double a : v) mean_v += a;
  mean_v /= static_cast<double>(n);
  if (epsilon == 0.0) return m - mean_v;
  double s = 0.0;
  for (double a : z) s += std::exp((a - m) / epsilon);
  return m + epsilon * std::log(s / static_cast<double>(n)) - mean_v;
}

std::size_t semidiscrete_assign(std::span<const double> v, const Cost& cost, std::span<const double> x,
                                const ObservationSet& Y) {
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < Y.size(); ++j) {
    const double val = cost(x, Y[j]) - v[j];
    if (val < best_val) {
      best_val = val;
      best = j;
    }
  }
  return best;
}

void semidiscrete_gradient(const SemiDiscreteState& state, const Cost& cost, std::span<const double> x,
                           const ObservationSet& Y, std::span<double> grad) {
  const std::size_t n = Y.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  if (state.epsilon == 0.0) {
    std::fill(grad.begin(), grad.end(), -inv_n);
    grad[semidiscrete_assign(state.v, cost, x, Y)] += 1.0;
    return;
  }
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    grad[j] = (state.v[j] - cost(x, Y[j])) / state.epsilon;
    m = std::max(m, grad[j]);
  }
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    grad[j] = std::exp(grad[j] - m);
    s += grad[j];
  }
  for (std::size_t j = 0; j < n; ++j) grad[j] = grad[j] / s - inv_n;
}

void semidiscrete_step_inplace(SemiDiscreteState& state, const Cost& cost, std::span<const double> x,
                               const ObservationSet& Y, std::span<double> scratch) {
  semidiscrete_gradient(state, cost, x, Y, scratch);
  const double g = state.step_size();
  for (std::size_t j = 0; j < state.v.size(); ++j) state.v[j] -= g * scratch[j];
  ++state.iter;
}

SemiDiscreteState semidiscrete_step(const SemiDiscreteState& state, const Cost& cost, std::span<const double> x,
                                    const ObservationSet& Y) {
  if (state.v.size() != Y.size()) throw std::invalid_argument("semi-discrete: state does not match observations");
  SemiDiscreteState next = state;
  std::vector<double> scratch(Y.size());
  semidiscrete_step_inplace(next, cost, x, Y, scratch);
  return next;
}

std::vector<double> semidiscrete_map(const SemiDiscreteState& state, const Cost& cost, const ObservationSet& Y,
                                     std::span<const double> x) {
  if (state.epsilon == 0.0) {
    throw std::invalid_argument("semi-discrete map is undefined for eps = 0; use semidiscrete_assign");
  }
  std::vector<double> out(Y.dims());
  kernels::barycentric_batch(cost, x, x.size(), Y.data(), Y.dims(), state.v, state.epsilon, out);
  return out;
}

SinkhornSolver::SinkhornSolver(const Cost& cost, const GridSpec& grid, const ObservationSet& Y, double epsilon)
    : p_(grid.total()), n_(Y.size()), eps_(epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon: must be positive");
  if (Y.empty()) throw std::invalid_argument("sinkhorn: empty observation set");
  C_ = kernels::cost_matrix(cost, grid, Y.data(), Y.dims());
  f_.assign(p_, 0.0);
  g_.assign(n_, 0.0);
  error_ = kernels::row_marginal_error(C_, p_, n_, f_, g_, eps_);
}

double SinkhornSolver::iterate(std::size_t k) {
  for (std::size_t t = 0; t < k; ++t) {
    kernels::softmin_rows(C_, p_, n_, g_, eps_, f_);
    kernels::softmin_cols(C_, p_, n_, f_, eps_, g_);
    ++iters_;
    error_ = kernels::row_marginal_error(C_, p_, n_, f_, g_, eps_);
    history_.push_back(error_);
  }
  return error_;
}

std::vector<double> SinkhornSolver::plan() const {
  std::vector<double> P(p_ * n_);
  const double inv = 1.0 / (static_cast<double>(p_) * static_cast<double>(n_));
  for (std::size_t i = 0; i < p_; ++i)
    for (std::size_t j = 0; j < n_; ++j) P[i * n_ + j] = std::exp((f_[i] + g_[j] - C_[i * n_ + j]) / eps_) * inv;
  return P;
}

SinkhornResult SinkhornSolver::result() const {
  SinkhornResult r;
  r.f = f_;
  r.g = g_;
  r.epsilon = eps_;
  r.iterations = iters_;
  r.error = error_;
  r.error_history = history_;
  return r;
}

SinkhornResult sinkhorn(const Cost& cost, const GridSpec& grid, const ObservationSet& Y, double epsilon, double tol,
                        std::size_t max_iters) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol: must be positive");
  SinkhornSolver s(cost, grid, Y, epsilon);
  while (s.iterations() < max_iters) {
    if (s.iterate() < tol) break;
  }
  SinkhornResult r = s.result();
  r.converged = r.error < tol;
  return r;
}

}  // namespace mkq

#include "mkq/eot_core.hpp"

#include <cmath>
#include <stdexcept>

#include "mkq/kernels.hpp"

namespace mkq {

namespace {

void check_point(const DualState& s, std::span<const double> y) {
  check_cost_dims(s.cost(), s.grid().dims(), y.size());
  for (double v : y) {
    if (std::isnan(v)) throw std::invalid_argument("observation contains NaN");
  }
}

}  // namespace

DualState::DualState(CoefficientVector coeffs, double epsilon, Cost cost)
    : coeffs_(std::move(coeffs)), epsilon_(epsilon) {
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) throw std::invalid_argument("epsilon must be positive");
  if (!coeffs_.freqs) throw std::invalid_argument("coefficients have no frequency set");
  costs_ = std::make_shared<const CostEvaluator>(cost, coeffs_.freqs->grid());
  for (const auto& c : coeffs_.coeffs) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw std::invalid_argument("coefficient is not finite");
  }
  u_ = inverse_transform(coeffs_).values;
}

DualState DualState::zero(const GridSpec& grid, double epsilon, Cost cost) {
  return DualState(CoefficientVector::zeros(FrequencySet::make(grid)), epsilon, cost);
}

DualState DualState::with_potential(FieldValues u, double epsilon, Cost cost) {
  if (!u.all_finite()) throw std::invalid_argument("potential is not finite");
  DualState s(forward_transform(u).coeffs, epsilon, cost);
  s.u_ = std::move(u.values);
  return s;
}

GibbsEval evaluate_gibbs(std::span<const double> u, std::span<const double> c, double eps, std::span<double> F) {
  const kernels::ExpSum es = kernels::gibbs_exponentials(u, c, eps, F);
  if (!F.empty()) {
    const double scale = static_cast<double>(u.size()) / es.sum;
    for (double& v : F) v *= scale;
  }
  return {kernels::log_mean_exp(es, u.size())};
}

FieldValues gibbs_density(const DualState& state, std::span<const double> y) {
  check_point(state, y);
  FieldValues c(state.grid());
  state.costs().field(y, c.values);
  FieldValues F(state.grid());
  evaluate_gibbs(state.potential(), c.values, state.epsilon(), F.values);
  return F;
}

double sample_objective(const DualState& state, std::span<const double> y) {
  check_point(state, y);
  std::vector<double> c(state.grid().total());
  state.costs().field(y, c);
  return state.epsilon() * evaluate_gibbs(state.potential(), c, state.epsilon(), {}).log_mean + state.epsilon();
}

double smooth_c_transform(const DualState& state, std::span<const double> y) {
  check_point(state, y);
  std::vector<double> c(state.grid().total());
  state.costs().field(y, c);
  return -state.epsilon() * evaluate_gibbs(state.potential(), c, state.epsilon(), {}).log_mean;
}

CoefficientVector stochastic_gradient(const DualState& state, std::span<const double> y) {
  FieldValues F = gibbs_density(state, y);
  CoefficientVector g = CoefficientVector::zeros(state.coeffs().freqs);
  SpectralWorkspace ws(state.coeffs().freqs);
  ws.forward(F.values, g.coeffs);
  return g;
}

double directional_derivative(const DualState& state, std::span<const double> y, const CoefficientVector& tau) {
  FieldValues F = gibbs_density(state, y);
  FieldValues S = inverse_transform(tau);
  return kernels::dot(F.values, S.values) / static_cast<double>(F.values.size());
}

double hessian_quadratic_form(const DualState& state, std::span<const double> y, const CoefficientVector& tau) {
  FieldValues F = gibbs_density(state, y);
  FieldValues S = inverse_transform(tau);
  const double p = static_cast<double>(F.values.size());
  const double m1 = kernels::dot(F.values, S.values) / p;
  const double m2 = kernels::weighted_square_sum(F.values, S.values) / p;
  return std::max(0.0, m2 - m1 * m1) / state.epsilon();
}

double convexity_certificate(const DualState& state, const ObservationSet& sample) {
  if (sample.empty()) throw std::invalid_argument("convexity certificate needs a nonempty sample");
  check_point(state, sample[0]);
  const std::size_t n = sample.size();
  const std::size_t p = state.grid().total();
  std::vector<double> second(n);
#pragma omp parallel if (n * p >= kernels::kParallelThreshold)
  {
    std::vector<double> c(p), F(p);
#pragma omp for schedule(static)
    for (std::size_t j = 0; j < n; ++j) {
      state.costs().field(sample[j], c);
      evaluate_gibbs(state.potential(), c, state.epsilon(), F);
      double s = 0.0;
      for (double f : F) s += f * f;
      second[j] = s / static_cast<double>(p);
    }
  }
  double avg = 0.0;
  for (double v : second) avg += v;
  return convexity_bound(state.epsilon(), avg / static_cast<double>(n));
}

double self_concordance_g(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - 0.5 * x;
  return -std::expm1(-x) / x;
}

}  // namespace mkq

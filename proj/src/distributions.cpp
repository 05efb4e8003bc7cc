#include "mkq/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

namespace mkq {

namespace {

ObservationSet draw(std::size_t d, std::size_t n, std::uint64_t seed, const Sampler& s, const char* label) {
  ObservationSet out(d);
  out.set_label(label);
  std::mt19937_64 rng(seed);
  std::vector<double> y(d);
  for (std::size_t j = 0; j < n; ++j) {
    s(rng, y);
    out.push_back(y);
  }
  return out;
}

double unif(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

void check_beta_params(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("beta: parameters must be positive");
}

}  // namespace

Sampler uniform_cube_sampler(std::size_t d) {
  return [d](std::mt19937_64& rng, std::span<double> out) {
    for (std::size_t k = 0; k < d; ++k) out[k] = unif(rng);
  };
}

ObservationSet sample_uniform_cube(std::size_t d, std::size_t n, std::uint64_t seed) {
  return draw(d, n, seed, uniform_cube_sampler(d), "uniform_cube");
}

Sampler spherical_uniform_sampler(std::size_t d) {
  return [d](std::mt19937_64& rng, std::span<double> out) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        out[k] = gauss(rng);
        norm += out[k] * out[k];
      }
    } while (norm == 0.0);
    const double r = unif(rng) / std::sqrt(norm);
    for (std::size_t k = 0; k < d; ++k) out[k] *= r;
  };
}

ObservationSet sample_spherical_uniform(std::size_t d, std::size_t n, std::uint64_t seed) {
  return draw(d, n, seed, spherical_uniform_sampler(d), "spherical_uniform");
}

Sampler banana_sampler(bool scaled) {
  return [scaled](std::mt19937_64& rng, std::span<double> out) {
    const double u = 2.0 * unif(rng) - 1.0;
    const double phi = unif(rng);
    const double z = unif(rng);
    const double r = 0.2 * z * (1.0 - (1.0 - std::abs(u)) / 2.0);
    const double a = 2.0 * std::numbers::pi * phi;
    out[0] = u + r * std::cos(a);
    out[1] = u * u + r * std::sin(a);
    if (scaled) {
      out[0] = banana_scale[0] * out[0] + banana_shift[0];
      out[1] = banana_scale[1] * out[1] + banana_shift[1];
    }
  };
}

ObservationSet sample_banana(std::size_t n, std::uint64_t seed, bool scaled) {
  return draw(2, n, seed, banana_sampler(scaled), "banana");
}

Sampler beta_sampler(double a, double b) {
  check_beta_params(a, b);
  return [a, b](std::mt19937_64& rng, std::span<double> out) {
    const double x = std::gamma_distribution<double>(a, 1.0)(rng);
    const double y = std::gamma_distribution<double>(b, 1.0)(rng);
    out[0] = x / (x + y);
  };
}

ObservationSet sample_beta(double a, double b, std::size_t n, std::uint64_t seed) {
  return draw(1, n, seed, beta_sampler(a, b), "beta");
}

double beta_cdf(double a, double b, double u) {
  check_beta_params(a, b);
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, u);
}

double beta_pdf(double a, double b, double u) {
  check_beta_params(a, b);
  if (u < 0.0 || u > 1.0) return 0.0;
  return boost::math::ibeta_derivative(a, b, u);
}

double beta_quantile(double a, double b, double u) {
  check_beta_params(a, b);
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("beta_quantile: u must lie in [0, 1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (beta_cdf(a, b, mid) < u) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

LinearMapTarget::LinearMapTarget(std::size_t d) : d_(d), A_(d * d, 0.0), b_(d, 1.0) {
  if (d == 0) throw std::invalid_argument("linear map: d must be positive");
  // (L^T L)_{ik} = sum_j L_ji L_jk with L_ji = 1 for j >= i, so the entry is d - max(i, k).
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) A_[i * d + k] = static_cast<double>(d - std::max(i, k));
}

void LinearMapTarget::apply(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < d_; ++i) {
    double s = b_[i];
    for (std::size_t k = 0; k < d_; ++k) s += A_[i * d_ + k] * x[k];
    out[i] = s;
  }
}

std::vector<double> LinearMapTarget::apply(std::span<const double> x) const {
  std::vector<double> out(d_);
  apply(x, out);
  return out;
}

Sampler LinearMapTarget::sampler() const {
  LinearMapTarget self = *this;
  return [self](std::mt19937_64& rng, std::span<double> out) {
    std::vector<double> x(self.d_);
    for (double& v : x) v = unif(rng);
    self.apply(x, out);
  };
}

ObservationSet LinearMapTarget::sample(std::size_t n, std::uint64_t seed) const {
  return draw(d_, n, seed, sampler(), "linear_map");
}

double empirical_quantile(std::span<const double> sorted, double u) {
  if (sorted.empty()) throw std::invalid_argument("empirical quantile: empty sample");
  const double J = static_cast<double>(sorted.size());
  std::size_t k = static_cast<std::size_t>(std::ceil(J * u));
  k = std::clamp<std::size_t>(k, 1, sorted.size());
  return sorted[k - 1];
}

}  // namespace mkq

#pragma once

// Independent reference computations and random generators for the tests.
// Nothing here calls into FFTW or boost.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "mkq/grid.hpp"
#include "mkq/spectral.hpp"

namespace oracle {

using mkq::Complex;

inline double phase(const mkq::GridSpec& g, std::size_t x_flat, const std::vector<long>& lambda) {
  const auto idx = g.multi_index(x_flat);
  double s = 0.0;
  for (std::size_t k = 0; k < g.dims(); ++k) {
    s += static_cast<double>(lambda[k]) * static_cast<double>(idx[k]) / static_cast<double>(g.sizes()[k]);
  }
  return 2.0 * std::numbers::pi * s;
}

/// theta_lambda = (1/p) sum_x exp(-2 pi i <lambda, x>) f(x), all frequencies including DC.
inline std::vector<Complex> naive_dft(const mkq::FrequencySet& fs, std::span<const double> f) {
  const auto& g = fs.grid();
  const std::size_t p = g.total();
  std::vector<Complex> out(p);
  for (std::size_t l = 0; l < p; ++l) {
    const auto lambda = fs.frequency(l);
    Complex s{0.0, 0.0};
    for (std::size_t x = 0; x < p; ++x) s += f[x] * std::polar(1.0, -phase(g, x, lambda));
    out[l] = s / static_cast<double>(p);
  }
  return out;
}

/// u(x) = sum_lambda theta_lambda exp(2 pi i <lambda, x>), real part.
inline std::vector<double> naive_synthesis(const mkq::FrequencySet& fs, std::span<const Complex> theta) {
  const auto& g = fs.grid();
  const std::size_t p = g.total();
  std::vector<double> out(p);
  for (std::size_t x = 0; x < p; ++x) {
    Complex s{0.0, 0.0};
    for (std::size_t l = 0; l < p; ++l) s += theta[l] * std::polar(1.0, phase(g, x, fs.frequency(l)));
    out[x] = s.real();
  }
  return out;
}

inline std::vector<double> random_field(std::mt19937_64& rng, std::size_t p, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  std::vector<double> f(p);
  for (auto& v : f) v = n(rng);
  return f;
}

/// Hermitian, DC-free coefficients with entries decaying like 1/(1 + |lambda|)^decay.
inline mkq::CoefficientVector random_coeffs(std::mt19937_64& rng, std::shared_ptr<const mkq::FrequencySet> fs,
                                            double scale, double decay = 2.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  auto c = mkq::CoefficientVector::zeros(fs);
  for (std::size_t i = 1; i < c.size(); ++i) {
    const double s = scale / std::pow(1.0 + fs->norm(i), decay);
    c[i] = Complex{n(rng) * s, n(rng) * s};
  }
  mkq::symmetrize(c.coeffs, *fs);
  return c;
}

/// Unit perturbation direction on the Hermitian manifold for frequency index l:
/// real part (imag = false) or imaginary part (imag = true) of the pair (l, -l).
inline mkq::CoefficientVector pair_direction(std::shared_ptr<const mkq::FrequencySet> fs, std::size_t l, bool imag) {
  auto c = mkq::CoefficientVector::zeros(fs);
  const std::size_t m = fs->negated(l);
  if (imag) {
    c[l] += Complex{0.0, 1.0};
    c[m] += Complex{0.0, -1.0};
  } else {
    c[l] += Complex{1.0, 0.0};
    if (m != l) c[m] += Complex{1.0, 0.0};
  }
  return c;
}

inline mkq::CoefficientVector axpy(const mkq::CoefficientVector& a, double t, const mkq::CoefficientVector& b) {
  auto c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += t * b[i];
  return c;
}

/// Composite Simpson rule on [a, b] with an even number of panels.
template <class F>
double simpson(F f, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Beta CDF by quadrature of the density, normalized by lgamma.
inline double beta_cdf_quadrature(double a, double b, double x) {
  const double logB = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  auto pdf = [&](double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return std::exp((a - 1) * std::log(t) + (b - 1) * std::log1p(-t) - logB);
  };
  return simpson(pdf, 0.0, x, 4000);
}

inline double beta_quantile_quadrature(double a, double b, double u) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (beta_cdf_quadrature(a, b, mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Direct grid-mean log-sum-exp without any shift or helper from the library.
inline double log_mean_exp_direct(std::span<const double> z) {
  double m = -1e300;
  for (double v : z) m = std::max(m, v);
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s / static_cast<double>(z.size()));
}

}  // namespace oracle

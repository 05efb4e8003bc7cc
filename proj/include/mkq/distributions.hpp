#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mkq/observations.hpp"

namespace mkq {

/// i.i.d. uniform on [0,1)^d.
ObservationSet sample_uniform_cube(std::size_t d, std::size_t n, std::uint64_t seed);
Sampler uniform_cube_sampler(std::size_t d);

/// R Phi with R ~ U[0,1] and Phi uniform on the unit sphere.
ObservationSet sample_spherical_uniform(std::size_t d, std::size_t n, std::uint64_t seed);
Sampler spherical_uniform_sampler(std::size_t d);

/// Banana-shaped law: (U + R cos 2 pi Phi, U^2 + R sin 2 pi Phi) with
/// R = 0.2 Z (1 - (1 - |U|)/2). With `scaled`, mapped into [-0.6,0.6] x [-0.4,0.5].
ObservationSet sample_banana(std::size_t n, std::uint64_t seed, bool scaled);
Sampler banana_sampler(bool scaled);

/// Affine constants of the scaled banana: y_k -> banana_scale[k] * y_k + banana_shift[k].
inline constexpr double banana_scale[2] = {0.5, 0.9 / 1.3025};
inline constexpr double banana_shift[2] = {0.0, -0.4 + 0.1025 * (0.9 / 1.3025)};

ObservationSet sample_beta(double a, double b, std::size_t n, std::uint64_t seed);
Sampler beta_sampler(double a, double b);

/// Regularized incomplete beta I_u(a, b).
double beta_cdf(double a, double b, double u);
double beta_pdf(double a, double b, double u);
/// Inverse of beta_cdf by bisection to 1e-12.
double beta_quantile(double a, double b, double u);

/// Q(x) = L^T L x + b with L lower triangular and L, b filled with ones.
class LinearMapTarget {
 public:
  explicit LinearMapTarget(std::size_t d);

  std::size_t dims() const { return d_; }
  const std::vector<double>& matrix() const { return A_; }  // row-major L^T L
  const std::vector<double>& offset() const { return b_; }

  void apply(std::span<const double> x, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> x) const;
  ObservationSet sample(std::size_t n, std::uint64_t seed) const;
  Sampler sampler() const;

 private:
  std::size_t d_;
  std::vector<double> A_, b_;
};

/// Generalized inverse of the empirical CDF: the ceil(J u)-th order statistic.
double empirical_quantile(std::span<const double> sorted, double u);

}  // namespace mkq

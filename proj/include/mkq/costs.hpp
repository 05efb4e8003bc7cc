#pragma once

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mkq/grid.hpp"

namespace mkq {

enum class CostKind { StandardQuadratic, TorusQuadratic, PolarQuadratic };

std::string to_string(CostKind kind);
/// Accepts "quadratic" | "torus" | "polar".
CostKind parse_cost_kind(std::string_view name);

/// Ground cost c(x, y).
///
/// StandardQuadratic: 0.5 |x - y|^2.
/// TorusQuadratic: 0.5 d_T(x, y) with d_T the flat-torus distance, or
///   0.5 d_T(x, y)^2 when `squared_torus` is set.
/// PolarQuadratic: x = (r, psi) is mapped to (r cos 2 pi psi, r sin 2 pi psi)
///   and the standard cost is applied; y is Cartesian.
struct Cost {
  CostKind kind = CostKind::StandardQuadratic;
  bool squared_torus = false;

  double operator()(std::span<const double> x, std::span<const double> y) const;

  friend bool operator==(const Cost&, const Cost&) = default;
};

/// Cartesian image of a polar point (r, psi), psi in turns.
inline void polar_to_cartesian(double r, double psi, double& cx, double& cy);

/// Reduces a coordinate difference into [-1/2, 1/2).
inline double wrap_half(double d);

/// Pointwise cost over every grid point.
FieldValues cost_field(const Cost& cost, const GridSpec& grid, std::span<const double> y);

/// Precomputed grid geometry for repeated cost fields on one grid. Produces
/// values bit-identical to pointwise evaluation.
class CostEvaluator {
 public:
  CostEvaluator(Cost cost, GridSpec grid);

  const Cost& cost() const { return cost_; }
  const GridSpec& grid() const { return grid_; }
  /// Dimension expected for y.
  std::size_t target_dims() const { return grid_.dims(); }

  void field(std::span<const double> y, std::span<double> out) const;

 private:
  Cost cost_;
  GridSpec grid_;
  std::vector<std::vector<double>> axis_coords_;
  std::vector<double> cart_x_, cart_y_;  // polar grids only
};

void check_cost_dims(const Cost& cost, std::size_t x_dims, std::size_t y_dims);

// -- inline definitions --

inline void polar_to_cartesian(double r, double psi, double& cx, double& cy) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  const double a = two_pi * psi;
  cx = r * std::cos(a);
  cy = r * std::sin(a);
}

inline double wrap_half(double d) { return d - std::floor(d + 0.5); }

}  // namespace mkq


#include "mkq/costs.hpp"

#include <stdexcept>

namespace mkq {

std::string to_string(CostKind kind) {
  switch (kind) {
    case CostKind::StandardQuadratic: return "quadratic";
    case CostKind::TorusQuadratic: return "torus";
    case CostKind::PolarQuadratic: return "polar";
  }
  return "unknown";
}

CostKind parse_cost_kind(std::string_view name) {
  if (name == "quadratic") return CostKind::StandardQuadratic;
  if (name == "torus") return CostKind::TorusQuadratic;
  if (name == "polar") return CostKind::PolarQuadratic;
  throw std::invalid_argument("unknown cost kind '" + std::string(name) + "'");
}

void check_cost_dims(const Cost& cost, std::size_t x_dims, std::size_t y_dims) {
  if (cost.kind == CostKind::PolarQuadratic) {
    if (x_dims != 2 || y_dims != 2) throw std::invalid_argument("cost: polar cost requires d = 2");
  } else if (x_dims != y_dims) {
    throw std::invalid_argument("cost: dimension mismatch between x and y");
  }
}

double Cost::operator()(std::span<const double> x, std::span<const double> y) const {
  check_cost_dims(*this, x.size(), y.size());
  double s = 0.0;
  switch (kind) {
    case CostKind::StandardQuadratic:
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        s += d * d;
      }
      return 0.5 * s;
    case CostKind::TorusQuadratic:
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = wrap_half(x[k] - y[k]);
        s += d * d;
      }
      return squared_torus ? 0.5 * s : 0.5 * std::sqrt(s);
    case CostKind::PolarQuadratic: {
      double cx, cy;
      polar_to_cartesian(x[0], x[1], cx, cy);
      const double dx = cx - y[0];
      const double dy = cy - y[1];
      s += dx * dx;
      s += dy * dy;
      return 0.5 * s;
    }
  }
  return s;
}

CostEvaluator::CostEvaluator(Cost cost, GridSpec grid) : cost_(cost), grid_(std::move(grid)) {
  if (cost_.kind == CostKind::PolarQuadratic) {
    if (grid_.dims() != 2) throw std::invalid_argument("cost: polar cost requires a 2-d (r, psi) grid");
    const std::size_t p = grid_.total();
    cart_x_.resize(p);
    cart_y_.resize(p);
    double pt[2];
    for (std::size_t i = 0; i < p; ++i) {
      grid_.point(i, pt);
      polar_to_cartesian(pt[0], pt[1], cart_x_[i], cart_y_[i]);
    }
    return;
  }
  axis_coords_.resize(grid_.dims());
  for (std::size_t k = 0; k < grid_.dims(); ++k) {
    axis_coords_[k].resize(grid_.sizes()[k]);
    for (std::size_t i = 0; i < grid_.sizes()[k]; ++i) axis_coords_[k][i] = grid_.coordinate(k, i);
  }
}

void CostEvaluator::field(std::span<const double> y, std::span<double> out) const {
  check_cost_dims(cost_, grid_.dims(), y.size());
  const std::size_t p = grid_.total();
  if (cost_.kind == CostKind::PolarQuadratic) {
    for (std::size_t i = 0; i < p; ++i) {
      const double dx = cart_x_[i] - y[0];
      const double dy = cart_y_[i] - y[1];
      double s = 0.0;
      s += dx * dx;
      s += dy * dy;
      out[i] = 0.5 * s;
    }
    return;
  }

  const bool torus = cost_.kind == CostKind::TorusQuadratic;
  const std::size_t d = grid_.dims();
  std::vector<std::vector<double>> sq(d);
  for (std::size_t k = 0; k < d; ++k) {
    sq[k].resize(axis_coords_[k].size());
    for (std::size_t i = 0; i < sq[k].size(); ++i) {
      const double diff = torus ? wrap_half(axis_coords_[k][i] - y[k]) : axis_coords_[k][i] - y[k];
      sq[k][i] = diff * diff;
    }
  }

  std::vector<std::size_t> idx(d, 0);
  for (std::size_t flat = 0; flat < p; ++flat) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += sq[k][idx[k]];
    out[flat] = (torus && !cost_.squared_torus) ? 0.5 * std::sqrt(s) : 0.5 * s;
    for (std::size_t k = d; k-- > 0;) {
      if (++idx[k] < grid_.sizes()[k]) break;
      idx[k] = 0;
    }
  }
}

FieldValues cost_field(const Cost& cost, const GridSpec& grid, std::span<const double> y) {
  FieldValues f(grid);
  CostEvaluator(cost, grid).field(y, f.values);
  return f;
}

}  // namespace mkq

#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mkq/costs.hpp"
#include "mkq/eot_core.hpp"
#include "mkq/observations.hpp"
#include "mkq/spectral.hpp"

namespace mkq {

/// Frozen solver output: Q(x) = sum_j softmax_j((conj_j - c(x, Y_j))/eps) Y_j.
struct EntropicMapEstimator {
  CoefficientVector coeffs;
  double epsilon = 0.0;
  Cost cost;
  GridSpec grid;
  ObservationSet observations;
  std::vector<double> conjugates;  // u^{c,eps}(Y_j)
  std::vector<double> potential;   // u on the grid

  bool is_polar() const { return cost.kind == CostKind::PolarQuadratic; }
};

EntropicMapEstimator build_estimator(const DualState& state, const ObservationSet& Y);

/// Estimator from externally computed conjugate values (e.g. Sinkhorn's g and,
/// optionally, its grid potential f). An empty potential is stored as zeros.
EntropicMapEstimator make_estimator(const GridSpec& grid, const Cost& cost, double epsilon, ObservationSet Y,
                                    std::vector<double> conjugates, std::vector<double> potential = {});

/// Softmax weights over the observations at x (native coordinates).
std::vector<double> map_weights(const EntropicMapEstimator& est, std::span<const double> x);

/// x in native coordinates: a point of [0,1)^d, or (r, psi) for polar estimators.
std::vector<double> evaluate_map(const EntropicMapEstimator& est, std::span<const double> x);
/// Polar estimators only: x is a Cartesian point of the unit ball.
std::vector<double> evaluate_map_cartesian(const EntropicMapEstimator& est, std::span<const double> x);
/// Row-wise evaluate_map over a set of native query points.
ObservationSet evaluate_map_batch(const EntropicMapEstimator& est, const ObservationSet& xs);

/// (u^{c,eps})^{c,eps}(x) = -eps log( (1/n) sum_j exp((conj_j - c(x, Y_j))/eps) ).
double double_conjugate(const EntropicMapEstimator& est, std::span<const double> x);

struct QuantileContour {
  double level = 0.0;
  std::vector<double> points;  // interleaved (x, y), one per angle

  std::size_t size() const { return points.size() / 2; }
};

QuantileContour quantile_contour(const EntropicMapEstimator& est, double level, std::size_t n_angles);

/// Columns level,angle_index,x,y.
void write_contours_csv(std::ostream& os, std::span<const QuantileContour> contours);
void write_contours_csv_file(const std::string& path, std::span<const QuantileContour> contours);

/// Bilinear interpolation of the polar potential, clamped in r and periodic in psi.
double polar_potential(const EntropicMapEstimator& est, double r, double psi);
/// The same at a Cartesian point with |x| <= 1.
double cartesian_potential(const EntropicMapEstimator& est, std::span<const double> x);

/// JSON container holding coefficients, eps, grid, cost, observations and conjugates.
void save_estimator(std::ostream& os, const EntropicMapEstimator& est);
EntropicMapEstimator load_estimator(std::istream& is);
void save_estimator_file(const std::string& path, const EntropicMapEstimator& est);
EntropicMapEstimator load_estimator_file(const std::string& path);

}  // namespace mkq

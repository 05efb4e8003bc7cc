#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mkq/observations.hpp"

namespace mkq {

using MapFn = std::function<void(std::span<const double> x, std::span<double> out)>;

/// mean over probes of |est(X) - truth(X)|^2.
double mse(const MapFn& est, const MapFn& truth, const ObservationSet& probe, std::size_t out_dims);
/// The same for precomputed images, row by row.
double mse(const ObservationSet& est_images, const ObservationSet& true_images);

struct PointwiseCurve {
  std::vector<double> x;
  std::vector<double> mse_estimator;
  std::vector<double> mse_empirical;
};

/// One replicate: a fresh J-sample, then the estimator's values at every probe x.
struct CurveFamily {
  std::function<ObservationSet(std::uint64_t seed)> draw_sample;
  std::function<std::vector<double>(const ObservationSet& sample, std::span<const double> xs, std::uint64_t seed)>
      estimate;
  std::function<double(double)> truth;
};

/// d = 1 pointwise MSE over R >= 2 replicates, with the empirical-quantile
/// baseline computed from the same samples. Replicates run in parallel.
PointwiseCurve pointwise_mse_curve(const CurveFamily& family, std::span<const double> xs, std::size_t replicates,
                                   std::uint64_t seed);

void write_csv(std::ostream& os, const PointwiseCurve& curve);

struct BenchCheckpoint {
  std::size_t iterations = 0;
  double seconds = 0.0;
  double mse = 0.0;
};

struct BenchReplicate {
  std::size_t replicate = 0;
  std::vector<BenchCheckpoint> checkpoints;
  bool censored = true;
  double seconds_to_threshold = std::numeric_limits<double>::quiet_NaN();
  std::size_t iterations_to_threshold = 0;
};

struct BenchSummary {
  std::size_t finished = 0;
  std::size_t censored = 0;
  double mean_seconds = std::numeric_limits<double>::quiet_NaN();
  double sd_seconds = std::numeric_limits<double>::quiet_NaN();
  double mean_iterations = std::numeric_limits<double>::quiet_NaN();
  double sd_iterations = std::numeric_limits<double>::quiet_NaN();
  double mean_final_mse = std::numeric_limits<double>::quiet_NaN();
  double sd_final_mse = std::numeric_limits<double>::quiet_NaN();
};

struct BenchReport {
  std::string solver;
  std::string problem;
  std::size_t n_obs = 0;
  double threshold = 1e-2;
  std::vector<BenchReplicate> replicates;

  /// Censored replicates never enter the time and iteration statistics.
  BenchSummary summary() const;
};

/// Linear-map problem of the race: uniform source on [0,1]^d, target Q#mu.
struct RaceProblem {
  std::size_t d = 2;
  std::vector<std::size_t> grid_sizes{20, 20};
  std::size_t n_obs = 1000;
  std::size_t n_probe = 500;
  double epsilon = 0.005;
  std::uint64_t seed = 0;
  /// Every replicate reuses the same seed (determinism check).
  bool shared_seed = false;

  std::string label() const;
};

struct RaceSolver {
  std::string kind = "fft";  // fft | semidiscrete | sinkhorn
  double gamma = 0.0;        // 0 picks the solver default
  double c_exponent = 0.75;
  double alpha = 2.0;
  std::size_t max_iters = 200000;
  double max_seconds = std::numeric_limits<double>::infinity();
  /// Checkpoint spacing in iterations; 0 picks max(1, max_iters / 100).
  std::size_t checkpoint_every = 0;
};

/// Default step size for a solver kind on a problem.
double default_gamma(const std::string& kind, const RaceProblem& problem);

/// Runs each replicate until the probe MSE falls below `threshold` or the
/// budget runs out. Checkpoint evaluation is excluded from the timings.
BenchReport time_to_threshold(const RaceSolver& solver, const RaceProblem& problem, double threshold,
                              std::size_t replicates = 10);

/// One row per replicate plus the summary columns.
void write_csv(std::ostream& os, const BenchReport& report);
void write_json(std::ostream& os, const BenchReport& report);
/// solver,n,replicate,seconds,mse with one row per checkpoint.
void write_long_csv(std::ostream& os, std::span<const BenchReport> reports);

}  // namespace mkq

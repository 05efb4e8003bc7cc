#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mkq/costs.hpp"
#include "mkq/eot_core.hpp"
#include "mkq/grid.hpp"
#include "mkq/observations.hpp"
#include "mkq/spectral.hpp"

namespace mkq {

struct SolverConfig {
  double epsilon = 0.005;
  double gamma = 0.005;
  double c_exponent = 0.75;
  double alpha = 2.0;
  GridSpec grid;
  Cost cost;
  std::size_t max_iters = 1;
  std::uint64_t seed = 0;
  /// Checkpoint spacing; 0 picks max(1, max_iters / 100).
  std::size_t record_every = 0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  /// gamma_n = gamma (n + 1)^-c for the 0-based pre-step counter n.
  double step_size(std::size_t n) const;
  std::size_t checkpoint_every() const;
};

struct SolverState {
  CoefficientVector coeffs;
  std::size_t iter = 0;
  WeightVector weights;
  double avg_objective = 0.0;
};

struct Checkpoint {
  std::size_t iter = 0;
  double avg_objective = 0.0;
  double mse = std::numeric_limits<double>::quiet_NaN();
  double elapsed_s = 0.0;
};

struct RunRecord {
  std::vector<Checkpoint> rows;
};

/// Columns iter,avg_objective,mse,elapsed_s; a missing mse is an empty cell.
void write_csv(std::ostream& os, const RunRecord& record);
void write_csv_file(const std::string& path, const RunRecord& record);
RunRecord read_run_record(std::istream& is);

SolverState initial_state(const SolverConfig& config);

/// One preconditioned stochastic gradient step from `state` at observation y.
SolverState step(const SolverState& state, const SolverConfig& config, std::span<const double> y);

/// In-place engine behind `step` and `run`, keeping its buffers between iterations.
class FourierSgd {
 public:
  explicit FourierSgd(const SolverConfig& config);
  FourierSgd(const SolverConfig& config, SolverState initial);

  const SolverConfig& config() const { return config_; }
  const SolverState& state() const { return state_; }
  /// Potential on the grid for the current coefficients.
  std::span<const double> potential();
  DualState dual() const;

  void step(std::span<const double> y);

 private:
  void refresh_potential();

  SolverConfig config_;
  SolverState state_;
  CostEvaluator costs_;
  SpectralWorkspace ws_;
  std::vector<double> u_, c_, F_;
  std::vector<Complex> g_;
  bool u_fresh_ = false;
};

/// Returned by checkpoint callbacks: an optional MSE for the record, and
/// whether to stop early.
struct CheckpointResult {
  std::optional<double> mse;
  bool stop = false;
};
using CheckpointFn = std::function<CheckpointResult(FourierSgd&)>;

struct RunResult {
  SolverState state;
  RunRecord record;
};

/// Runs max_iters steps over the stream. Time spent inside `on_checkpoint` is
/// excluded from elapsed_s.
RunResult run(const SolverConfig& config, ObservationStream& stream, const CheckpointFn& on_checkpoint = {});
/// Cycles through a finite sample, reshuffled per epoch from the config seed.
RunResult run(const SolverConfig& config, const ObservationSet& sample, const CheckpointFn& on_checkpoint = {});

/// Same iteration on a (radius, angle) grid; requires the polar cost.
RunResult run_polar(const SolverConfig& config, ObservationStream& stream, const CheckpointFn& on_checkpoint = {});
RunResult run_polar(const SolverConfig& config, const ObservationSet& sample, const CheckpointFn& on_checkpoint = {});

/// Default configuration for polar problems: alpha = 0, (p1, p2) grid.
SolverConfig polar_config(std::size_t radii, std::size_t angles, double epsilon);

}  // namespace mkq

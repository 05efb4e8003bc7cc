#include "mkq/sgd_fourier.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "mkq/kernels.hpp"

namespace mkq {

void SolverConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon: must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma: must be positive");
  if (!(c_exponent > 0.5 && c_exponent <= 1.0)) throw std::invalid_argument("c_exponent: must lie in (1/2, 1]");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha: must be finite and >= 0");
  if (grid.dims() == 0) throw std::invalid_argument("grid: not set");
  if (max_iters == 0) throw std::invalid_argument("max_iters: must be >= 1");
  if (cost.kind == CostKind::PolarQuadratic && grid.dims() != 2) {
    throw std::invalid_argument("grid: polar cost needs a (radius, angle) grid");
  }
}

double SolverConfig::step_size(std::size_t n) const {
  return gamma * std::pow(static_cast<double>(n + 1), -c_exponent);
}

std::size_t SolverConfig::checkpoint_every() const {
  if (record_every > 0) return record_every;
  return std::max<std::size_t>(1, max_iters / 100);
}

SolverState initial_state(const SolverConfig& config) {
  auto freqs = FrequencySet::make(config.grid);
  SolverState s;
  s.coeffs = CoefficientVector::zeros(freqs);
  s.weights = make_weights(freqs, config.alpha);
  return s;
}

FourierSgd::FourierSgd(const SolverConfig& config) : FourierSgd(config, initial_state(config)) {}

FourierSgd::FourierSgd(const SolverConfig& config, SolverState initial)
    : config_(config),
      state_(std::move(initial)),
      costs_(config.cost, config.grid),
      ws_(state_.coeffs.freqs),
      u_(config.grid.total()),
      c_(config.grid.total()),
      F_(config.grid.total()),
      g_(config.grid.total()) {
  config_.validate();
  if (!(state_.coeffs.freqs->grid() == config_.grid)) throw std::invalid_argument("grid: state does not match config");
  if (state_.weights.weights.size() != config_.grid.total()) state_.weights = make_weights(state_.coeffs.freqs, config_.alpha);
}

void FourierSgd::refresh_potential() {
  if (!u_fresh_) {
    ws_.inverse(state_.coeffs.coeffs, u_);
    u_fresh_ = true;
  }
}

std::span<const double> FourierSgd::potential() {
  refresh_potential();
  return u_;
}

DualState FourierSgd::dual() const { return DualState(state_.coeffs, config_.epsilon, config_.cost); }

void FourierSgd::step(std::span<const double> y) {
  refresh_potential();
  costs_.field(y, c_);
  const double eps = config_.epsilon;
  const GibbsEval ge = evaluate_gibbs(u_, c_, eps, F_);
  const double h = eps * ge.log_mean + eps;

  ws_.forward(F_, g_);
  const double gamma_n = config_.step_size(state_.iter);
  auto& theta = state_.coeffs.coeffs;
  const auto& w = state_.weights.weights;
  for (std::size_t i = 1; i < theta.size(); ++i) theta[i] -= (gamma_n * w[i]) * g_[i];

  state_.avg_objective += (h - state_.avg_objective) / static_cast<double>(state_.iter + 1);
  ++state_.iter;
  u_fresh_ = false;
}

SolverState step(const SolverState& state, const SolverConfig& config, std::span<const double> y) {
  FourierSgd engine(config, state);
  engine.step(y);
  return engine.state();
}

RunResult run(const SolverConfig& config, ObservationStream& stream, const CheckpointFn& on_checkpoint) {
  config.validate();
  check_cost_dims(config.cost, config.grid.dims(), stream.dims());
  using clock = std::chrono::steady_clock;

  FourierSgd engine(config);
  RunRecord record;
  std::vector<double> y(stream.dims());
  const std::size_t every = config.checkpoint_every();
  double elapsed = 0.0;
  auto t0 = clock::now();

  for (std::size_t n = 0; n < config.max_iters; ++n) {
    stream.next(y);
    engine.step(y);
    const bool last = n + 1 == config.max_iters;
    if ((n + 1) % every == 0 || last) {
      elapsed += std::chrono::duration<double>(clock::now() - t0).count();
      Checkpoint cp;
      cp.iter = engine.state().iter;
      cp.avg_objective = engine.state().avg_objective;
      cp.elapsed_s = elapsed;
      for (const auto& th : engine.state().coeffs.coeffs) {
        if (!std::isfinite(th.real()) || !std::isfinite(th.imag())) {
          throw std::runtime_error("solver diverged at iteration " + std::to_string(cp.iter));
        }
      }
      bool stop = false;
      if (on_checkpoint) {
        CheckpointResult r = on_checkpoint(engine);
        if (r.mse) cp.mse = *r.mse;
        stop = r.stop;
      }
      record.rows.push_back(cp);
      if (stop) break;
      t0 = clock::now();
    }
  }
  return {engine.state(), std::move(record)};
}

RunResult run(const SolverConfig& config, const ObservationSet& sample, const CheckpointFn& on_checkpoint) {
  if (sample.empty()) throw std::invalid_argument("observations: empty stream");
  CyclicStream stream(sample, derive_seed(config.seed, 1));
  return run(config, stream, on_checkpoint);
}

namespace {

void check_polar(const SolverConfig& config) {
  if (config.cost.kind != CostKind::PolarQuadratic) throw std::invalid_argument("cost: run_polar needs the polar cost");
}

}  // namespace

RunResult run_polar(const SolverConfig& config, ObservationStream& stream, const CheckpointFn& on_checkpoint) {
  check_polar(config);
  return run(config, stream, on_checkpoint);
}

RunResult run_polar(const SolverConfig& config, const ObservationSet& sample, const CheckpointFn& on_checkpoint) {
  check_polar(config);
  return run(config, sample, on_checkpoint);
}

SolverConfig polar_config(std::size_t radii, std::size_t angles, double epsilon) {
  SolverConfig c;
  c.epsilon = epsilon;
  c.gamma = epsilon;
  c.alpha = 0.0;
  c.grid = GridSpec({radii, angles});
  c.cost = Cost{CostKind::PolarQuadratic};
  return c;
}

void write_csv(std::ostream& os, const RunRecord& record) {
  os << "iter,avg_objective,mse,elapsed_s\n" << std::setprecision(17);
  for (const auto& r : record.rows) {
    os << r.iter << ',' << r.avg_objective << ',';
    if (!std::isnan(r.mse)) os << r.mse;
    os << ',' << r.elapsed_s << '\n';
  }
}

void write_csv_file(const std::string& path, const RunRecord& record) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_csv(out, record);
}

RunRecord read_run_record(std::istream& is) {
  RunRecord rec;
  std::string line;
  std::getline(is, line);
  if (line.rfind("iter,avg_objective,mse,elapsed_s", 0) != 0) throw std::runtime_error("run record: bad header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c, d;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    std::getline(ss, c, ',');
    std::getline(ss, d, ',');
    Checkpoint cp;
    cp.iter = std::stoull(a);
    cp.avg_objective = std::stod(b);
    if (!c.empty()) cp.mse = std::stod(c);
    cp.elapsed_s = std::stod(d);
    rec.rows.push_back(cp);
  }
  return rec;
}

}  // namespace mkq

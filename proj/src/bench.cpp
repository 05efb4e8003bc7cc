#include "mkq/bench.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "mkq/baselines.hpp"
#include "mkq/distributions.hpp"
#include "mkq/entropic_map.hpp"
#include "mkq/kernels.hpp"
#include "mkq/sgd_fourier.hpp"

namespace mkq {

double mse(const MapFn& est, const MapFn& truth, const ObservationSet& probe, std::size_t out_dims) {
  if (probe.empty()) throw std::invalid_argument("mse: empty probe set");
  std::vector<double> a(out_dims), b(out_dims);
  double s = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    est(probe[i], a);
    truth(probe[i], b);
    for (std::size_t k = 0; k < out_dims; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  }
  return s / static_cast<double>(probe.size());
}

double mse(const ObservationSet& est_images, const ObservationSet& true_images) {
  if (est_images.dims() != true_images.dims()) throw std::invalid_argument("mse: dimension mismatch");
  if (est_images.size() != true_images.size()) throw std::invalid_argument("mse: probe count mismatch");
  if (est_images.empty()) throw std::invalid_argument("mse: empty probe set");
  double s = 0.0;
  const auto& a = est_images.data();
  const auto& b = true_images.data();
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(est_images.size());
}

PointwiseCurve pointwise_mse_curve(const CurveFamily& family, std::span<const double> xs, std::size_t replicates,
                                   std::uint64_t seed) {
  if (replicates < 2) throw std::invalid_argument("pointwise curve: need at least 2 replicates");
  const std::size_t q = xs.size();
  std::vector<std::vector<double>> est_err(replicates, std::vector<double>(q));
  std::vector<std::vector<double>> emp_err(replicates, std::vector<double>(q));

  const int saved_levels = omp_get_max_active_levels();
  omp_set_max_active_levels(1);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t r = 0; r < replicates; ++r) {
    const std::uint64_t rs = derive_seed(seed, r);
    ObservationSet sample = family.draw_sample(derive_seed(rs, 0));
    std::vector<double> est = family.estimate(sample, xs, derive_seed(rs, 1));
    std::vector<double> sorted(sample.data());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < q; ++k) {
      const double t = family.truth(xs[k]);
      est_err[r][k] = (est[k] - t) * (est[k] - t);
      const double e = empirical_quantile(sorted, xs[k]) - t;
      emp_err[r][k] = e * e;
    }
  }
  omp_set_max_active_levels(saved_levels);

  PointwiseCurve c;
  c.x.assign(xs.begin(), xs.end());
  c.mse_estimator.assign(q, 0.0);
  c.mse_empirical.assign(q, 0.0);
  for (std::size_t r = 0; r < replicates; ++r) {
    for (std::size_t k = 0; k < q; ++k) {
      c.mse_estimator[k] += est_err[r][k];
      c.mse_empirical[k] += emp_err[r][k];
    }
  }
  for (std::size_t k = 0; k < q; ++k) {
    c.mse_estimator[k] /= static_cast<double>(replicates);
    c.mse_empirical[k] /= static_cast<double>(replicates);
  }
  return c;
}

void write_csv(std::ostream& os, const PointwiseCurve& curve) {
  os << "x,mse_estimator,mse_empirical\n" << std::setprecision(17);
  for (std::size_t k = 0; k < curve.x.size(); ++k) {
    os << curve.x[k] << ',' << curve.mse_estimator[k] << ',' << curve.mse_empirical[k] << '\n';
  }
}

namespace {

struct MeanSd {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double sd = std::numeric_limits<double>::quiet_NaN();
};

MeanSd mean_sd(const std::vector<double>& v) {
  MeanSd r;
  if (v.empty()) return r;
  double s = 0.0;
  for (double a : v) s += a;
  r.mean = s / static_cast<double>(v.size());
  if (v.size() < 2) {
    r.sd = 0.0;
    return r;
  }
  double q = 0.0;
  for (double a : v) q += (a - r.mean) * (a - r.mean);
  r.sd = std::sqrt(q / static_cast<double>(v.size() - 1));
  return r;
}

using Clock = std::chrono::steady_clock;

struct RaceData {
  GridSpec grid;
  ObservationSet Y;
  ObservationSet probe;
  ObservationSet truth;
};

RaceData make_race_data(const RaceProblem& pb, std::uint64_t seed) {
  RaceData data;
  data.grid = GridSpec(pb.grid_sizes);
  if (data.grid.dims() != pb.d) throw std::invalid_argument("grid: dimension does not match d");
  LinearMapTarget target(pb.d);
  data.Y = target.sample(pb.n_obs, derive_seed(seed, 10));
  data.probe = sample_uniform_cube(pb.d, pb.n_probe, derive_seed(seed, 11));
  std::vector<double> t(pb.n_probe * pb.d);
  for (std::size_t i = 0; i < pb.n_probe; ++i) target.apply(data.probe[i], std::span<double>(t).subspan(i * pb.d, pb.d));
  data.truth = ObservationSet(pb.d, std::move(t));
  return data;
}

double probe_mse(const RaceData& data, const Cost& cost, std::span<const double> conj, double eps) {
  std::vector<double> out(data.probe.size() * data.Y.dims());
  kernels::barycentric_batch(cost, data.probe.data(), data.probe.dims(), data.Y.data(), data.Y.dims(), conj, eps, out);
  return mse(ObservationSet(data.Y.dims(), std::move(out)), data.truth);
}

// Drives a solver through `advance(k)` calls; `evaluate()` returns the probe
// MSE and is excluded from the clock.
template <class Advance, class Evaluate>
BenchReplicate race(std::size_t r, const RaceSolver& s, double threshold, std::size_t every, Clock::time_point start,
                    Advance advance, Evaluate evaluate) {
  BenchReplicate rep;
  rep.replicate = r;
  double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  std::size_t done = 0;
  while (done < s.max_iters && elapsed < s.max_seconds) {
    const std::size_t k = std::min(every, s.max_iters - done);
    auto t0 = Clock::now();
    advance(k);
    elapsed += std::chrono::duration<double>(Clock::now() - t0).count();
    done += k;
    const double m = evaluate();
    rep.checkpoints.push_back({done, elapsed, m});
    if (m < threshold) {
      rep.censored = false;
      rep.seconds_to_threshold = elapsed;
      rep.iterations_to_threshold = done;
      break;
    }
  }
  return rep;
}

BenchReplicate race_one(const RaceSolver& s, const RaceProblem& pb, double threshold, std::size_t r) {
  const std::uint64_t seed = pb.shared_seed ? pb.seed : derive_seed(pb.seed, r);
  const RaceData data = make_race_data(pb, seed);
  const Cost cost{CostKind::StandardQuadratic};
  const double eps = pb.epsilon;
  const double gamma = s.gamma > 0.0 ? s.gamma : default_gamma(s.kind, pb);
  std::size_t every = s.checkpoint_every;
  if (every == 0) every = s.kind == "sinkhorn" ? 1 : std::max<std::size_t>(1, s.max_iters / 100);

  if (s.kind == "fft") {
    SolverConfig cfg;
    cfg.epsilon = eps;
    cfg.gamma = gamma;
    cfg.c_exponent = s.c_exponent;
    cfg.alpha = s.alpha;
    cfg.grid = data.grid;
    cfg.cost = cost;
    cfg.max_iters = s.max_iters;
    cfg.seed = seed;
    auto start = Clock::now();
    FourierSgd engine(cfg);
    CyclicStream stream(data.Y, derive_seed(seed, 1));
    std::vector<double> y(pb.d);
    return race(r, s, threshold, every, start,
                [&](std::size_t k) {
                  for (std::size_t t = 0; t < k; ++t) {
                    stream.next(y);
                    engine.step(y);
                  }
                },
                [&] {
                  const auto est = build_estimator(engine.dual(), data.Y);
                  return probe_mse(data, cost, est.conjugates, eps);
                });
  }
  if (s.kind == "semidiscrete") {
    auto start = Clock::now();
    SemiDiscreteState st = semidiscrete_init(data.Y.size(), eps, gamma, s.c_exponent);
    SamplerStream xs(pb.d, uniform_cube_sampler(pb.d), derive_seed(seed, 2));
    std::vector<double> x(pb.d), scratch(data.Y.size());
    return race(r, s, threshold, every, start,
                [&](std::size_t k) {
                  for (std::size_t t = 0; t < k; ++t) {
                    xs.next(x);
                    semidiscrete_step_inplace(st, cost, x, data.Y, scratch);
                  }
                },
                [&] { return probe_mse(data, cost, st.v, eps); });
  }
  if (s.kind == "sinkhorn") {
    auto start = Clock::now();
    SinkhornSolver sk(cost, data.grid, data.Y, eps);
    return race(r, s, threshold, every, start, [&](std::size_t k) { sk.iterate(k); },
                [&] { return probe_mse(data, cost, sk.g(), eps); });
  }
  throw std::invalid_argument("solver: unknown kind '" + s.kind + "'");
}

}  // namespace

std::string RaceProblem::label() const {
  std::string g;
  for (std::size_t k = 0; k < grid_sizes.size(); ++k) g += (k ? "x" : "") + std::to_string(grid_sizes[k]);
  return "linear_map_d" + std::to_string(d) + "_grid" + g;
}

double default_gamma(const std::string& kind, const RaceProblem& problem) {
  if (kind == "fft") return 1.0;
  if (kind == "semidiscrete") return 0.2 * static_cast<double>(std::max<std::size_t>(problem.n_obs, 1));
  return 1.0;
}

BenchSummary BenchReport::summary() const {
  BenchSummary s;
  std::vector<double> secs, iters, finals;
  for (const auto& r : replicates) {
    if (!r.checkpoints.empty()) finals.push_back(r.checkpoints.back().mse);
    if (r.censored) {
      ++s.censored;
      continue;
    }
    ++s.finished;
    secs.push_back(r.seconds_to_threshold);
    iters.push_back(static_cast<double>(r.iterations_to_threshold));
  }
  auto a = mean_sd(secs), b = mean_sd(iters), c = mean_sd(finals);
  s.mean_seconds = a.mean;
  s.sd_seconds = a.sd;
  s.mean_iterations = b.mean;
  s.sd_iterations = b.sd;
  s.mean_final_mse = c.mean;
  s.sd_final_mse = c.sd;
  return s;
}

BenchReport time_to_threshold(const RaceSolver& solver, const RaceProblem& problem, double threshold,
                              std::size_t replicates) {
  if (!(threshold > 0.0)) throw std::invalid_argument("threshold: must be positive");
  if (replicates == 0) throw std::invalid_argument("replicates: must be >= 1");
  BenchReport report;
  report.solver = solver.kind;
  report.problem = problem.label();
  report.n_obs = problem.n_obs;
  report.threshold = threshold;
  report.replicates.resize(replicates);

  const int saved_levels = omp_get_max_active_levels();
  omp_set_max_active_levels(1);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t r = 0; r < replicates; ++r) {
    try {
      report.replicates[r] = race_one(solver, problem, threshold, r);
    } catch (...) {
#pragma omp critical
      failure = std::current_exception();
    }
  }
  omp_set_max_active_levels(saved_levels);
  if (failure) std::rethrow_exception(failure);
  return report;
}

namespace {

void put(std::ostream& os, double v) {
  if (std::isfinite(v)) os << v;
}

}  // namespace

void write_csv(std::ostream& os, const BenchReport& report) {
  const BenchSummary s = report.summary();
  os << "solver,problem,n,threshold,replicate,censored,seconds_to_threshold,iterations_to_threshold,final_mse,"
        "mean_seconds,sd_seconds\n"
     << std::setprecision(17);
  for (const auto& r : report.replicates) {
    os << report.solver << ',' << report.problem << ',' << report.n_obs << ',' << report.threshold << ','
       << r.replicate << ',' << (r.censored ? 1 : 0) << ',';
    put(os, r.seconds_to_threshold);
    os << ',';
    if (!r.censored) os << r.iterations_to_threshold;
    os << ',';
    if (!r.checkpoints.empty()) put(os, r.checkpoints.back().mse);
    os << ',';
    put(os, s.mean_seconds);
    os << ',';
    put(os, s.sd_seconds);
    os << '\n';
  }
}

void write_json(std::ostream& os, const BenchReport& report) {
  using nlohmann::json;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  const BenchSummary s = report.summary();
  json j;
  j["solver"] = report.solver;
  j["problem"] = report.problem;
  j["n"] = report.n_obs;
  j["threshold"] = report.threshold;
  j["summary"] = {{"finished", s.finished},          {"censored", s.censored},
                  {"mean_seconds", num(s.mean_seconds)}, {"sd_seconds", num(s.sd_seconds)},
                  {"mean_iterations", num(s.mean_iterations)}, {"sd_iterations", num(s.sd_iterations)},
                  {"mean_final_mse", num(s.mean_final_mse)}, {"sd_final_mse", num(s.sd_final_mse)}};
  j["replicates"] = json::array();
  for (const auto& r : report.replicates) {
    json cps = json::array();
    for (const auto& c : r.checkpoints) cps.push_back({{"iterations", c.iterations}, {"seconds", c.seconds}, {"mse", num(c.mse)}});
    j["replicates"].push_back({{"replicate", r.replicate},
                               {"censored", r.censored},
                               {"seconds_to_threshold", num(r.seconds_to_threshold)},
                               {"iterations_to_threshold", r.censored ? json(nullptr) : json(r.iterations_to_threshold)},
                               {"checkpoints", cps}});
  }
  os << j.dump(2) << '\n';
}

void write_long_csv(std::ostream& os, std::span<const BenchReport> reports) {
  os << "solver,n,replicate,seconds,mse\n" << std::setprecision(17);
  for (const auto& rep : reports)
    for (const auto& r : rep.replicates)
      for (const auto& c : r.checkpoints)
        os << rep.solver << ',' << rep.n_obs << ',' << r.replicate << ',' << c.seconds << ',' << c.mse << '\n';
}

}  // namespace mkq

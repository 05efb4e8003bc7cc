#include "mkq/entropic_map.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "mkq/kernels.hpp"

namespace mkq {

EntropicMapEstimator build_estimator(const DualState& state, const ObservationSet& Y) {
  if (Y.empty()) throw std::invalid_argument("estimator: empty observation set");
  check_cost_dims(state.cost(), state.grid().dims(), Y.dims());
  EntropicMapEstimator est;
  est.coeffs = state.coeffs();
  est.epsilon = state.epsilon();
  est.cost = state.cost();
  est.grid = state.grid();
  est.observations = Y;
  est.potential.assign(state.potential().begin(), state.potential().end());
  est.conjugates.resize(Y.size());
  kernels::smooth_conjugates(state.costs(), state.potential(), state.epsilon(), Y.data(), Y.dims(), est.conjugates);
  return est;
}

EntropicMapEstimator make_estimator(const GridSpec& grid, const Cost& cost, double epsilon, ObservationSet Y,
                                    std::vector<double> conjugates, std::vector<double> potential) {
  if (Y.empty()) throw std::invalid_argument("estimator: empty observation set");
  if (conjugates.size() != Y.size()) throw std::invalid_argument("estimator: conjugates length must equal n");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon: must be positive");
  if (!potential.empty() && potential.size() != grid.total()) throw std::invalid_argument("estimator: potential length must equal p");
  EntropicMapEstimator est;
  est.coeffs = CoefficientVector::zeros(FrequencySet::make(grid));
  est.epsilon = epsilon;
  est.cost = cost;
  est.grid = grid;
  est.observations = std::move(Y);
  est.conjugates = std::move(conjugates);
  est.potential = potential.empty() ? std::vector<double>(grid.total(), 0.0) : std::move(potential);
  return est;
}

std::vector<double> map_weights(const EntropicMapEstimator& est, std::span<const double> x) {
  const auto& Y = est.observations;
  const std::size_t n = Y.size();
  std::vector<double> w(n);
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = (est.conjugates[j] - est.cost(x, Y[j])) / est.epsilon;
    m = std::max(m, w[j]);
  }
  double s = 0.0;
  for (double& v : w) {
    v = std::exp(v - m);
    s += v;
  }
  for (double& v : w) v /= s;
  return w;
}

std::vector<double> evaluate_map(const EntropicMapEstimator& est, std::span<const double> x) {
  std::vector<double> out(est.observations.dims());
  kernels::barycentric_batch(est.cost, x, x.size(), est.observations.data(), est.observations.dims(), est.conjugates,
                             est.epsilon, out);
  return out;
}

std::vector<double> evaluate_map_cartesian(const EntropicMapEstimator& est, std::span<const double> x) {
  if (!est.is_polar()) throw std::invalid_argument("evaluate_map_cartesian: estimator is not polar");
  std::vector<double> out(est.observations.dims());
  kernels::barycentric_batch(Cost{CostKind::StandardQuadratic}, x, x.size(), est.observations.data(),
                             est.observations.dims(), est.conjugates, est.epsilon, out);
  return out;
}

ObservationSet evaluate_map_batch(const EntropicMapEstimator& est, const ObservationSet& xs) {
  std::vector<double> out(xs.size() * est.observations.dims());
  kernels::barycentric_batch(est.cost, xs.data(), xs.dims(), est.observations.data(), est.observations.dims(),
                             est.conjugates, est.epsilon, out);
  return ObservationSet(est.observations.dims(), std::move(out));
}

double double_conjugate(const EntropicMapEstimator& est, std::span<const double> x) {
  const auto& Y = est.observations;
  const std::size_t n = Y.size();
  std::vector<double> z(n);
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    z[j] = (est.conjugates[j] - est.cost(x, Y[j])) / est.epsilon;
    m = std::max(m, z[j]);
  }
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return -est.epsilon * (m + std::log(s / static_cast<double>(n)));
}

QuantileContour quantile_contour(const EntropicMapEstimator& est, double level, std::size_t n_angles) {
  if (!est.is_polar()) throw std::invalid_argument("contour: estimator is not polar");
  if (!(level > 0.0 && level <= 1.0)) throw std::invalid_argument("level: must lie in (0, 1]");
  if (n_angles == 0) throw std::invalid_argument("angles: must be positive");
  std::vector<double> xs(2 * n_angles);
  for (std::size_t k = 0; k < n_angles; ++k) {
    xs[2 * k] = level;
    xs[2 * k + 1] = static_cast<double>(k) / static_cast<double>(n_angles);
  }
  QuantileContour c;
  c.level = level;
  c.points.resize(2 * n_angles);
  kernels::barycentric_batch(est.cost, xs, 2, est.observations.data(), 2, est.conjugates, est.epsilon, c.points);
  return c;
}

void write_contours_csv(std::ostream& os, std::span<const QuantileContour> contours) {
  os << "level,angle_index,x,y\n" << std::setprecision(17);
  for (const auto& c : contours) {
    for (std::size_t k = 0; k < c.size(); ++k) {
      os << c.level << ',' << k << ',' << c.points[2 * k] << ',' << c.points[2 * k + 1] << '\n';
    }
  }
}

void write_contours_csv_file(const std::string& path, std::span<const QuantileContour> contours) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_contours_csv(out, contours);
}

double polar_potential(const EntropicMapEstimator& est, double r, double psi) {
  if (!est.is_polar()) throw std::invalid_argument("potential: estimator is not polar");
  const std::size_t pr = est.grid.sizes()[0];
  const std::size_t pa = est.grid.sizes()[1];
  // fractional grid indices
  double fr = r * static_cast<double>(pr) - est.grid.offsets()[0];
  fr = std::clamp(fr, 0.0, static_cast<double>(pr - 1));
  double fa = (psi - std::floor(psi)) * static_cast<double>(pa) - est.grid.offsets()[1];
  fa -= std::floor(fa / static_cast<double>(pa)) * static_cast<double>(pa);

  std::size_t i0 = static_cast<std::size_t>(fr);
  if (i0 >= pr - 1) i0 = pr - 2;
  const double tr = fr - static_cast<double>(i0);
  std::size_t j0 = static_cast<std::size_t>(fa) % pa;
  const double ta = fa - std::floor(fa);
  const std::size_t j1 = (j0 + 1) % pa;

  const auto& u = est.potential;
  const double a = u[i0 * pa + j0] * (1.0 - ta) + u[i0 * pa + j1] * ta;
  const double b = u[(i0 + 1) * pa + j0] * (1.0 - ta) + u[(i0 + 1) * pa + j1] * ta;
  return a * (1.0 - tr) + b * tr;
}

double cartesian_potential(const EntropicMapEstimator& est, std::span<const double> x) {
  if (x.size() != 2) throw std::invalid_argument("potential: expected a 2-d point");
  const double r = std::hypot(x[0], x[1]);
  if (r > 1.0 + 1e-12) throw std::invalid_argument("potential: point outside the unit ball");
  double psi = std::atan2(x[1], x[0]) / (2.0 * std::numbers::pi);
  if (psi < 0.0) psi += 1.0;
  return polar_potential(est, r, psi);
}

namespace {

using nlohmann::json;

json to_json(const EntropicMapEstimator& est) {
  json j;
  j["format"] = "mkq-estimator";
  j["version"] = 1;
  j["epsilon"] = est.epsilon;
  j["cost"] = to_string(est.cost.kind);
  j["squared_torus"] = est.cost.squared_torus;
  j["grid"] = {{"sizes", est.grid.sizes()}, {"offsets", est.grid.offsets()}};
  std::vector<double> re, im;
  for (const auto& c : est.coeffs.coeffs) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  j["coeffs_re"] = re;
  j["coeffs_im"] = im;
  j["dims"] = est.observations.dims();
  j["observations"] = est.observations.data();
  j["conjugates"] = est.conjugates;
  j["potential"] = est.potential;
  return j;
}

}  // namespace

void save_estimator(std::ostream& os, const EntropicMapEstimator& est) { os << to_json(est).dump() << '\n'; }

EntropicMapEstimator load_estimator(std::istream& is) {
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("estimator: ") + e.what());
  }
  if (j.value("format", "") != "mkq-estimator") throw std::runtime_error("estimator: not an estimator file");
  EntropicMapEstimator est;
  est.epsilon = j.at("epsilon").get<double>();
  est.cost.kind = parse_cost_kind(j.at("cost").get<std::string>());
  est.cost.squared_torus = j.value("squared_torus", false);
  est.grid = GridSpec(j.at("grid").at("sizes").get<std::vector<std::size_t>>(),
                      j.at("grid").at("offsets").get<std::vector<double>>());
  auto re = j.at("coeffs_re").get<std::vector<double>>();
  auto im = j.at("coeffs_im").get<std::vector<double>>();
  if (re.size() != est.grid.total() || im.size() != re.size()) throw std::runtime_error("estimator: bad coefficients");
  est.coeffs = CoefficientVector::zeros(FrequencySet::make(est.grid));
  for (std::size_t i = 0; i < re.size(); ++i) est.coeffs[i] = Complex{re[i], im[i]};
  est.observations = ObservationSet(j.at("dims").get<std::size_t>(), j.at("observations").get<std::vector<double>>());
  est.conjugates = j.at("conjugates").get<std::vector<double>>();
  est.potential = j.at("potential").get<std::vector<double>>();
  if (est.conjugates.size() != est.observations.size()) throw std::runtime_error("estimator: conjugates length mismatch");
  if (est.potential.size() != est.grid.total()) throw std::runtime_error("estimator: potential length mismatch");
  return est;
}

void save_estimator_file(const std::string& path, const EntropicMapEstimator& est) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << std::setprecision(17);
  save_estimator(out, est);
}

EntropicMapEstimator load_estimator_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return load_estimator(in);
}

}  // namespace mkq

#include "mkq/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mkq {

using nlohmann::json;

namespace {

const std::set<std::string> kSubcommands{"solve", "map", "contour", "bench", "certify"};
const std::set<std::string> kSolvers{"fft", "semidiscrete", "sinkhorn"};

template <class T>
void read(const json& j, const char* key, T& out) {
  try {
    out = j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(key) + ": wrong type");
  }
}

}  // namespace

nlohmann::json to_json(const ExperimentConfig& c) {
  return json{{"subcommand", c.subcommand},
              {"solver", c.solver},
              {"preset", c.preset},
              {"data", c.data},
              {"cost", c.cost},
              {"squared_torus", c.squared_torus},
              {"epsilon", c.epsilon},
              {"gamma", c.gamma},
              {"c_exponent", c.c_exponent},
              {"alpha", c.alpha},
              {"grid", c.grid},
              {"iters", c.iters},
              {"sample_size", c.sample_size},
              {"dims", c.dims},
              {"seed", c.seed},
              {"record_every", c.record_every},
              {"output", c.output},
              {"levels", c.levels},
              {"angles", c.angles},
              {"estimator", c.estimator},
              {"queries", c.queries},
              {"race", c.race},
              {"threshold", c.threshold},
              {"replicates", c.replicates},
              {"n_obs", c.n_obs},
              {"probe", c.probe},
              {"budget_seconds", c.budget_seconds},
              {"sinkhorn_tol", c.sinkhorn_tol}};
}

void apply_json(ExperimentConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  for (const auto& [key, v] : j.items()) {
    const char* k = key.c_str();
    if (key == "subcommand") read(v, k, c.subcommand);
    else if (key == "solver") read(v, k, c.solver);
    else if (key == "preset") read(v, k, c.preset);
    else if (key == "data") read(v, k, c.data);
    else if (key == "cost") read(v, k, c.cost);
    else if (key == "squared_torus") read(v, k, c.squared_torus);
    else if (key == "epsilon") read(v, k, c.epsilon);
    else if (key == "gamma") read(v, k, c.gamma);
    else if (key == "c_exponent") read(v, k, c.c_exponent);
    else if (key == "alpha") read(v, k, c.alpha);
    else if (key == "grid") read(v, k, c.grid);
    else if (key == "iters") read(v, k, c.iters);
    else if (key == "sample_size") read(v, k, c.sample_size);
    else if (key == "dims") read(v, k, c.dims);
    else if (key == "seed") read(v, k, c.seed);
    else if (key == "record_every") read(v, k, c.record_every);
    else if (key == "output") read(v, k, c.output);
    else if (key == "levels") read(v, k, c.levels);
    else if (key == "angles") read(v, k, c.angles);
    else if (key == "estimator") read(v, k, c.estimator);
    else if (key == "queries") read(v, k, c.queries);
    else if (key == "race") read(v, k, c.race);
    else if (key == "threshold") read(v, k, c.threshold);
    else if (key == "replicates") read(v, k, c.replicates);
    else if (key == "n_obs") read(v, k, c.n_obs);
    else if (key == "probe") read(v, k, c.probe);
    else if (key == "budget_seconds") read(v, k, c.budget_seconds);
    else if (key == "sinkhorn_tol") read(v, k, c.sinkhorn_tol);
    else throw ConfigError(key + ": unknown key");
  }
}

std::vector<std::string> preset_names() { return {"beta1d", "banana2d", "linear_map", "custom"}; }

void apply_preset(ExperimentConfig& c, const std::string& preset) {
  c.preset = preset;
  if (preset == "beta1d") {
    c.cost = "quadratic";
    c.epsilon = 0.005;
    c.gamma = 0.005;
    c.c_exponent = 0.75;
    c.alpha = 2.0;
    c.grid = {256};
    c.iters = 100000;
    c.sample_size = 0;
  } else if (preset == "banana2d") {
    c.cost = "polar";
    c.epsilon = 0.005;
    c.gamma = 0.005;
    c.c_exponent = 0.75;
    c.alpha = 0.0;
    c.grid = {10, 100};
    c.iters = 100000;
    c.sample_size = 1000;
    c.levels = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    c.angles = 64;
  } else if (preset == "linear_map") {
    c.cost = "quadratic";
    c.epsilon = 0.005;
    c.gamma = 1.0;
    c.c_exponent = 0.75;
    c.alpha = 2.0;
    c.dims = 2;
    c.grid = {20, 20};
    c.iters = 200000;
    c.sample_size = 10000;
    c.n_obs = {10000};
    c.probe = 500;
  } else if (preset != "custom") {
    throw ConfigError("preset: unknown preset '" + preset + "'");
  }
}

Cost ExperimentConfig::cost_model() const {
  Cost k;
  try {
    k.kind = parse_cost_kind(cost);
  } catch (const std::invalid_argument&) {
    throw ConfigError("cost: must be quadratic, torus or polar");
  }
  k.squared_torus = squared_torus;
  return k;
}

void ExperimentConfig::validate() const {
  if (!kSubcommands.count(subcommand)) throw ConfigError("subcommand: unknown '" + subcommand + "'");
  if (!kSolvers.count(solver)) throw ConfigError("solver: must be fft, semidiscrete or sinkhorn");
  const auto presets = preset_names();
  if (std::find(presets.begin(), presets.end(), preset) == presets.end()) throw ConfigError("preset: unknown '" + preset + "'");
  const Cost k = cost_model();
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon: must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma: must be positive");
  if (!(c_exponent > 0.5 && c_exponent <= 1.0)) throw ConfigError("c_exponent: must lie in (1/2, 1]");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha: must be finite and >= 0");
  // map, certify and contour-from-file take the grid from the saved estimator
  const bool solves = subcommand == "solve" || subcommand == "bench" || (subcommand == "contour" && estimator.empty());
  if (solves) {
    if (grid.empty()) throw ConfigError("grid: must list at least one axis size");
    for (auto s : grid)
      if (s < 2) throw ConfigError("grid: every axis needs at least 2 points");
    if (k.kind == CostKind::PolarQuadratic && grid.size() != 2) throw ConfigError("grid: polar cost needs (radii, angles)");
  }
  if (iters == 0) throw ConfigError("iters: must be >= 1");
  if (output.empty()) throw ConfigError("output: must be a directory path");
  if (preset == "custom" && (subcommand == "solve" || subcommand == "contour") && data.empty()) {
    throw ConfigError("data: the custom preset needs a CSV of observations");
  }
  if (solves && preset == "linear_map" && grid.size() != dims) throw ConfigError("grid: linear_map needs one size per dimension");
  for (double l : levels)
    if (!(l > 0.0 && l <= 1.0)) throw ConfigError("levels: every level must lie in (0, 1]");
  if (angles == 0) throw ConfigError("angles: must be positive");
  if (subcommand == "contour" && estimator.empty() && k.kind != CostKind::PolarQuadratic) throw ConfigError("cost: contours need the polar cost");
  if ((subcommand == "map" || subcommand == "certify") && estimator.empty()) throw ConfigError("estimator: path required");
  if (subcommand == "map" && queries.empty()) throw ConfigError("queries: path required");
  if (subcommand == "bench") {
    if (race.empty()) throw ConfigError("race: list at least one solver");
    for (const auto& r : race)
      if (!kSolvers.count(r)) throw ConfigError("race: unknown solver '" + r + "'");
    if (!(threshold > 0.0)) throw ConfigError("threshold: must be positive");
    if (replicates == 0) throw ConfigError("replicates: must be >= 1");
    if (n_obs.empty()) throw ConfigError("n_obs: list at least one sample size");
    if (probe == 0) throw ConfigError("probe: must be >= 1");
    if (grid.size() != dims) throw ConfigError("grid: bench needs one size per dimension");
  }
  if (!(sinkhorn_tol > 0.0)) throw ConfigError("sinkhorn_tol: must be positive");
  if (!(budget_seconds > 0.0)) throw ConfigError("budget_seconds: must be positive");
}

}  // namespace mkq

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mkq/costs.hpp"

namespace mkq {

/// Invalid or inconsistent configuration; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string subcommand;
  std::string solver = "fft";     // fft | semidiscrete | sinkhorn
  std::string preset = "custom";  // beta1d | banana2d | linear_map | custom
  std::string data;               // custom preset: CSV of observations
  std::string cost = "quadratic";
  bool squared_torus = false;
  double epsilon = 0.005;
  double gamma = 0.005;
  double c_exponent = 0.75;
  double alpha = 2.0;
  std::vector<std::size_t> grid;
  std::size_t iters = 100000;
  std::size_t sample_size = 0;  // J; 0 draws fresh observations every iteration
  std::size_t dims = 2;         // linear_map only
  std::uint64_t seed = 0;
  std::size_t record_every = 0;
  std::string output = "out";
  // contour
  std::vector<double> levels{0.5};
  std::size_t angles = 64;
  // map / certify
  std::string estimator;
  std::string queries;
  // bench
  std::vector<std::string> race{"fft"};
  double threshold = 1e-2;
  std::size_t replicates = 10;
  std::vector<std::size_t> n_obs{1000};
  std::size_t probe = 500;
  double budget_seconds = 600.0;
  // sinkhorn
  double sinkhorn_tol = 1e-9;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  Cost cost_model() const;
};

nlohmann::json to_json(const ExperimentConfig& c);
/// Applies every key of `j` onto `c`; unknown keys and wrong types raise ConfigError.
void apply_json(ExperimentConfig& c, const nlohmann::json& j);
/// Overwrites `c` with the defaults of a named preset.
void apply_preset(ExperimentConfig& c, const std::string& preset);
std::vector<std::string> preset_names();

}  // namespace mkq

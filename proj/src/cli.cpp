#include "mkq/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "mkq/baselines.hpp"
#include "mkq/bench.hpp"
#include "mkq/config.hpp"
#include "mkq/distributions.hpp"
#include "mkq/entropic_map.hpp"
#include "mkq/kernels.hpp"
#include "mkq/sgd_fourier.hpp"

namespace mkq {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct FlagSpec {
  const char* key;
  const char* flag;
  const char* help;
};

// Flags map one-to-one onto config keys.
const FlagSpec kFlags[] = {
    {"preset", "--preset", "beta1d | banana2d | linear_map | custom"},
    {"solver", "--solver", "fft | semidiscrete | sinkhorn"},
    {"data", "--data", "CSV of observations (custom preset)"},
    {"cost", "--cost", "quadratic | torus | polar"},
    {"epsilon", "--epsilon", "entropic regularization"},
    {"gamma", "--gamma", "step size constant"},
    {"c_exponent", "--c-exponent", "step size decay exponent in (1/2, 1]"},
    {"alpha", "--alpha", "preconditioner weight exponent"},
    {"grid", "--grid", "comma-separated axis sizes"},
    {"iters", "--iters", "iteration budget"},
    {"sample_size", "--sample-size", "observations J (0: one fresh draw per iteration)"},
    {"dims", "--dims", "dimension of the linear_map problem"},
    {"seed", "--seed", "master seed"},
    {"record_every", "--record-every", "checkpoint spacing"},
    {"output", "--output", "output directory"},
    {"levels", "--levels", "comma-separated contour levels"},
    {"angles", "--angles", "points per contour"},
    {"estimator", "--estimator", "saved estimator file"},
    {"queries", "--queries", "CSV of query points"},
    {"race", "--race", "comma-separated solvers to race"},
    {"threshold", "--threshold", "MSE threshold"},
    {"replicates", "--replicates", "replicates per solver"},
    {"n_obs", "--n-obs", "comma-separated observation counts"},
    {"probe", "--probe", "probe points for the MSE"},
    {"budget_seconds", "--budget", "per-replicate time budget in seconds"},
    {"sinkhorn_tol", "--sinkhorn-tol", "Sinkhorn marginal tolerance"},
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

json parse_scalar(const std::string& key, const std::string& text, const json& like) {
  try {
    std::size_t used = 0;
    if (like.is_number_unsigned() || like.is_number_integer()) {
      if (!text.empty() && text[0] == '-') throw std::invalid_argument("negative");
      const unsigned long long v = std::stoull(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing");
      return json(v);
    }
    if (like.is_number()) {
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing");
      return json(v);
    }
  } catch (const std::exception&) {
    throw ConfigError(key + ": cannot parse '" + text + "'");
  }
  return json(text);
}

json flag_to_json(const std::string& key, const std::string& text, const json& defaults) {
  const json& like = defaults.at(key);
  if (!like.is_array()) return parse_scalar(key, text, like);
  json arr = json::array();
  json elem_like = key == "race" ? json("") : key == "levels" ? json(0.0) : json(std::size_t{0});
  for (const auto& item : split(text)) arr.push_back(parse_scalar(key, item, elem_like));
  return arr;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

// Grid sizes of the linear-map study: 20^2, 10^3, 6^4.
std::vector<std::size_t> linear_map_grid(std::size_t d) {
  switch (d) {
    case 0: throw ConfigError("dims: must be >= 1");
    case 1: return {400};
    case 2: return {20, 20};
    case 3: return {10, 10, 10};
    case 4: return {6, 6, 6, 6};
    default: return std::vector<std::size_t>(d, 4);
  }
}

// Preset defaults, then the config file, then command-line flags.
ExperimentConfig resolve(const std::string& sub, const std::string& config_path,
                         const std::map<std::string, std::string>& flags, bool squared_torus_flag) {
  ExperimentConfig cfg;
  json file = json::object();
  if (!config_path.empty()) file = read_json_file(config_path);
  if (!file.is_object()) throw ConfigError("config: expected a JSON object");

  std::string preset = "custom";
  if (file.contains("preset")) {
    if (!file["preset"].is_string()) throw ConfigError("preset: wrong type");
    preset = file["preset"].get<std::string>();
  }
  if (auto it = flags.find("preset"); it != flags.end()) preset = it->second;
  // the race always runs on the linear-map problem
  if (sub == "bench" && preset == "custom") preset = "linear_map";
  apply_preset(cfg, preset);

  file.erase("subcommand");
  apply_json(cfg, file);
  const json defaults = to_json(cfg);
  json overrides = json::object();
  for (const auto& [key, text] : flags) overrides[key] = flag_to_json(key, text, defaults);
  apply_json(cfg, overrides);
  if (squared_torus_flag) cfg.squared_torus = true;
  if (cfg.preset == "linear_map" && !flags.count("grid") && !file.contains("grid")) cfg.grid = linear_map_grid(cfg.dims);
  cfg.subcommand = sub;
  cfg.validate();
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

void write_resolved(const ExperimentConfig& cfg, const fs::path& dir) {
  write_text(dir / "config.json", to_json(cfg).dump(2) + "\n");
}

ObservationSet problem_sample(const ExperimentConfig& cfg) {
  const std::uint64_t seed = derive_seed(cfg.seed, 100);
  const std::size_t J = cfg.sample_size > 0 ? cfg.sample_size : cfg.iters;
  if (cfg.preset == "beta1d") return sample_beta(5.0, 5.0, J, seed);
  if (cfg.preset == "banana2d") return sample_banana(J, seed, true);
  if (cfg.preset == "linear_map") return LinearMapTarget(cfg.dims).sample(J, seed);
  ObservationSet obs = read_csv_file(cfg.data);
  if (cfg.sample_size > 0 && cfg.sample_size < obs.size()) {
    obs = ObservationSet(obs.dims(), std::vector<double>(obs.data().begin(), obs.data().begin() + cfg.sample_size * obs.dims()),
                         obs.label());
  }
  return obs;
}

SolverConfig solver_config(const ExperimentConfig& cfg) {
  SolverConfig sc;
  sc.epsilon = cfg.epsilon;
  sc.gamma = cfg.gamma;
  sc.c_exponent = cfg.c_exponent;
  sc.alpha = cfg.alpha;
  sc.grid = GridSpec(cfg.grid);
  sc.cost = cfg.cost_model();
  sc.max_iters = cfg.iters;
  sc.seed = cfg.seed;
  sc.record_every = cfg.record_every;
  return sc;
}

struct Solved {
  EntropicMapEstimator estimator;
  RunRecord record;
  std::string summary;
};

Solved solve_problem(const ExperimentConfig& cfg) {
  const ObservationSet Y = problem_sample(cfg);
  const Cost cost = cfg.cost_model();
  const GridSpec grid(cfg.grid);
  check_cost_dims(cost, grid.dims(), Y.dims());
  Solved out;
  std::ostringstream summary;
  summary << std::setprecision(8);

  if (cfg.solver == "fft") {
    const SolverConfig sc = solver_config(cfg);
    RunResult r = run(sc, Y);
    out.record = std::move(r.record);
    out.estimator = build_estimator(DualState(r.state.coeffs, sc.epsilon, sc.cost), Y);
    summary << "solve fft: iters=" << r.state.iter << " avg_objective=" << r.state.avg_objective;
  } else if (cfg.solver == "semidiscrete") {
    SemiDiscreteState st = semidiscrete_init(Y.size(), cfg.epsilon, cfg.gamma, cfg.c_exponent);
    SamplerStream xs(grid.dims(), uniform_cube_sampler(grid.dims()), derive_seed(cfg.seed, 2));
    std::vector<double> x(grid.dims()), scratch(Y.size());
    for (std::size_t n = 0; n < cfg.iters; ++n) {
      xs.next(x);
      semidiscrete_step_inplace(st, cost, x, Y, scratch);
    }
    out.estimator = make_estimator(grid, cost, cfg.epsilon, Y, st.v);
    summary << "solve semidiscrete: iters=" << st.iter;
  } else {
    SinkhornResult r = sinkhorn(cost, grid, Y, cfg.epsilon, cfg.sinkhorn_tol, cfg.iters);
    out.estimator = make_estimator(grid, cost, cfg.epsilon, Y, r.g, r.f);
    summary << "solve sinkhorn: iters=" << r.iterations << " marginal_error=" << r.error
            << (r.converged ? "" : " (not converged)");
  }
  if (cfg.preset == "linear_map") {
    LinearMapTarget target(cfg.dims);
    ObservationSet probe = sample_uniform_cube(cfg.dims, cfg.probe, derive_seed(cfg.seed, 101));
    ObservationSet truth(cfg.dims);
    for (std::size_t i = 0; i < probe.size(); ++i) truth.push_back(target.apply(probe[i]));
    summary << " mse=" << mse(evaluate_map_batch(out.estimator, probe), truth);
  }
  out.summary = summary.str();
  return out;
}

int cmd_solve(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& out) {
  Solved s = solve_problem(cfg);
  save_estimator_file((dir / "estimator.json").string(), s.estimator);
  if (!s.record.rows.empty()) write_csv_file((dir / "run_record.csv").string(), s.record);
  out << s.summary << '\n';
  return 0;
}

int cmd_contour(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& out) {
  EntropicMapEstimator est;
  if (!cfg.estimator.empty()) {
    est = load_estimator_file(cfg.estimator);
  } else {
    Solved s = solve_problem(cfg);
    est = std::move(s.estimator);
    save_estimator_file((dir / "estimator.json").string(), est);
    if (!s.record.rows.empty()) write_csv_file((dir / "run_record.csv").string(), s.record);
  }
  std::vector<QuantileContour> contours;
  for (double level : cfg.levels) contours.push_back(quantile_contour(est, level, cfg.angles));
  write_contours_csv_file((dir / "contours.csv").string(), contours);
  for (const auto& c : contours) {
    std::ostringstream name;
    name << "contour_r" << std::fixed << std::setprecision(2) << c.level << ".csv";
    write_contours_csv_file((dir / name.str()).string(), std::span<const QuantileContour>(&c, 1));
  }
  out << "contour: " << contours.size() << " levels x " << cfg.angles << " angles written to " << dir.string() << '\n';
  return 0;
}

int cmd_map(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& out) {
  const EntropicMapEstimator est = load_estimator_file(cfg.estimator);
  const ObservationSet q = read_csv_file(cfg.queries);
  const std::size_t expect = est.grid.dims();
  if (q.dims() != expect) throw ConfigError("queries: expected " + std::to_string(expect) + " columns");
  const ObservationSet images = evaluate_map_batch(est, q);
  write_csv_file((dir / "map.csv").string(), images);
  out << "map: " << images.size() << " points written to " << (dir / "map.csv").string() << '\n';
  return 0;
}

int cmd_certify(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& out) {
  const EntropicMapEstimator est = load_estimator_file(cfg.estimator);
  const DualState state(est.coeffs, est.epsilon, est.cost);
  const ObservationSet sample = cfg.data.empty() ? est.observations : read_csv_file(cfg.data);
  const double c = convexity_certificate(state, sample);
  json j{{"certificate", c}, {"epsilon", est.epsilon}, {"n", sample.size()}, {"certified", c > 0.0}};
  write_text(dir / "certificate.json", j.dump(2) + "\n");
  out << std::setprecision(8) << "certify: c_eps=" << c << (c > 0.0 ? " (certified)" : " (not certified)") << '\n';
  return 0;
}

int cmd_bench(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& out) {
  std::vector<BenchReport> reports;
  for (std::size_t n : cfg.n_obs) {
    RaceProblem pb;
    pb.d = cfg.dims;
    pb.grid_sizes = cfg.grid;
    pb.n_obs = n;
    pb.n_probe = cfg.probe;
    pb.epsilon = cfg.epsilon;
    pb.seed = cfg.seed;
    for (const auto& kind : cfg.race) {
      RaceSolver s;
      s.kind = kind;
      s.c_exponent = cfg.c_exponent;
      s.alpha = cfg.alpha;
      s.max_iters = cfg.iters;
      s.max_seconds = cfg.budget_seconds;
      s.checkpoint_every = kind == "sinkhorn" ? 1 : cfg.record_every;
      // gamma from the config only applies to the FFT solver
      if (kind == "fft") s.gamma = cfg.gamma;
      reports.push_back(time_to_threshold(s, pb, cfg.threshold, cfg.replicates));
      const BenchSummary sm = reports.back().summary();
      out << std::setprecision(6) << "bench " << kind << " n=" << n << ": finished=" << sm.finished
          << " censored=" << sm.censored << " mean_seconds=" << sm.mean_seconds << " sd=" << sm.sd_seconds << '\n';
    }
  }
  std::ofstream csv(dir / "bench.csv");
  std::ofstream js(dir / "bench.json");
  std::ofstream lg(dir / "bench_long.csv");
  if (!csv || !js || !lg) throw std::runtime_error("cannot write bench outputs in '" + dir.string() + "'");
  bool header = true;
  for (const auto& r : reports) {
    std::ostringstream one;
    write_csv(one, r);
    std::string text = one.str();
    if (!header) text = text.substr(text.find('\n') + 1);
    header = false;
    csv << text;
  }
  js << "[\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    write_json(js, reports[i]);
    if (i + 1 < reports.size()) js << ",\n";
  }
  js << "]\n";
  write_long_csv(lg, reports);
  return 0;
}

void apply_thread_env() {
  const char* env = std::getenv("MKQ_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw ConfigError("MKQ_THREADS: must be a positive integer");
  kernels::set_max_threads(static_cast<int>(n));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropic optimal transport by SGD on Fourier coefficients; MK quantile maps and contours.", "mkq"};
  app.require_subcommand(1);

  std::string config_path;
  bool squared_torus = false;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> opts;

  const std::pair<const char*, const char*> subs[] = {
      {"solve", "Run a solver and save the estimator and run record"},
      {"map", "Evaluate a saved estimator on a CSV of query points"},
      {"contour", "Compute quantile contours of a polar estimator"},
      {"bench", "Race solvers to an MSE threshold on the linear-map problem"},
      {"certify", "Evaluate the convexity certificate of a saved estimator"},
  };
  std::vector<CLI::App*> apps;
  for (const auto& [name, desc] : subs) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "JSON config file (flags override it)");
    sub->add_flag("--squared-torus", squared_torus, "use 0.5 d_T^2 for the torus cost");
    for (const auto& f : kFlags) {
      std::string names = f.flag;
      if (std::string(f.key) == "output") names += ",-o";
      opts[std::string(name) + ":" + f.key] = sub->add_option(names, values[std::string(name) + ":" + f.key], f.help);
    }
    apps.push_back(sub);
  }

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    apply_thread_env();
    CLI::App* chosen = app.get_subcommands().front();
    const std::string sub = chosen->get_name();
    std::map<std::string, std::string> flags;
    for (const auto& f : kFlags) {
      const std::string id = sub + ":" + f.key;
      if (opts[id]->count() > 0) flags[f.key] = values[id];
    }
    ExperimentConfig cfg = resolve(sub, config_path, flags, squared_torus);
    const fs::path dir(cfg.output);
    fs::create_directories(dir);
    write_resolved(cfg, dir);
    if (sub == "solve") return cmd_solve(cfg, dir, out);
    if (sub == "contour") return cmd_contour(cfg, dir, out);
    if (sub == "map") return cmd_map(cfg, dir, out);
    if (sub == "certify") return cmd_certify(cfg, dir, out);
    return cmd_bench(cfg, dir, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace mkq

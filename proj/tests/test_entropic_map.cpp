#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "mkq/baselines.hpp"
#include "mkq/distributions.hpp"
#include "mkq/entropic_map.hpp"
#include "mkq/sgd_fourier.hpp"
#include "oracles.hpp"

using namespace mkq;

namespace {

const Cost kQuad{CostKind::StandardQuadratic};

EntropicMapEstimator random_estimator(std::mt19937_64& rng, std::size_t d, std::size_t n, double eps) {
  const GridSpec g(std::vector<std::size_t>(d, 8));
  auto fs = FrequencySet::make(g);
  DualState s(oracle::random_coeffs(rng, fs, 0.05), eps, kQuad);
  return build_estimator(s, sample_uniform_cube(d, n, rng()));
}

EntropicMapEstimator polar_fit(double eps, std::size_t iters) {
  auto cfg = polar_config(10, 100, eps);
  cfg.max_iters = iters;
  auto Y = sample_spherical_uniform(2, iters, 3);
  auto r = run_polar(cfg, Y);
  return build_estimator(DualState(r.state.coeffs, cfg.epsilon, cfg.cost), sample_spherical_uniform(2, 2000, 4));
}

}  // namespace

TEST_CASE("conjugates") {
  const GridSpec g({64});
  ObservationSet Y(1, {0.2, 0.7, 0.2});
  auto est = build_estimator(DualState::zero(g, 0.1, kQuad), Y);
  for (std::size_t j = 0; j < 3; ++j) {
    std::vector<double> z(64);
    for (std::size_t i = 0; i < 64; ++i) z[i] = -0.5 * std::pow(i / 64.0 - Y[j][0], 2) / 0.1;
    CHECK(est.conjugates[j] == doctest::Approx(-0.1 * oracle::log_mean_exp_direct(z)).epsilon(1e-13));
  }
  CHECK(est.conjugates[0] == est.conjugates[2]);

  std::mt19937_64 rng(1);
  auto fs = FrequencySet::make(GridSpec({12, 10}));
  DualState s(oracle::random_coeffs(rng, fs, 0.2), 0.05, Cost{CostKind::TorusQuadratic});
  auto Y2 = sample_uniform_cube(2, 3, 9);
  auto e2 = build_estimator(s, Y2);
  for (std::size_t j = 0; j < 3; ++j) CHECK(e2.conjugates[j] == doctest::Approx(smooth_c_transform(s, Y2[j])).epsilon(1e-12));
  CHECK_THROWS_AS(build_estimator(s, ObservationSet(2)), std::invalid_argument);
}

TEST_CASE("map weights and range") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 1 + t % 3;
    auto est = random_estimator(rng, d, 15, 0.01 + 0.1 * u(rng));
    const auto lo = est.observations.min(), hi = est.observations.max();
    for (int q = 0; q < 10; ++q) {
      std::vector<double> x(d);
      for (auto& v : x) v = u(rng);
      auto w = map_weights(est, x);
      double s = 0.0;
      for (double v : w) {
        CHECK(v >= 0.0);
        s += v;
      }
      CHECK(std::abs(s - 1.0) < 1e-12);
      auto y = evaluate_map(est, x);
      for (std::size_t k = 0; k < d; ++k) {
        CHECK(y[k] >= lo[k] - 1e-12);
        CHECK(y[k] <= hi[k] + 1e-12);
      }
    }
  }
}

TEST_CASE("degenerate estimators") {
  ObservationSet one(2, {0.3, 0.6});
  auto est = make_estimator(GridSpec({4, 4}), kQuad, 0.1, one, {0.0});
  for (double a : {0.0, 0.5, 0.9}) {
    auto y = evaluate_map(est, std::vector<double>{a, 1 - a});
    CHECK(y[0] == doctest::Approx(0.3));
    CHECK(y[1] == doctest::Approx(0.6));
  }
  auto wide = make_estimator(GridSpec({4}), kQuad, 1e9, ObservationSet(1, {0.1, 0.2, 0.9}), {0.0, 0.0, 0.0});
  CHECK(evaluate_map(wide, std::vector<double>{0.7})[0] == doctest::Approx(0.4));
  auto polar_one = make_estimator(GridSpec({4, 8}), Cost{CostKind::PolarQuadratic}, 0.05, ObservationSet(2, {0.2, -0.1}), {0.0});
  auto c = quantile_contour(polar_one, 0.5, 12);
  REQUIRE(c.size() == 12);
  for (std::size_t k = 0; k < 12; ++k) {
    CHECK(c.points[2 * k] == doctest::Approx(0.2));
    CHECK(c.points[2 * k + 1] == doctest::Approx(-0.1));
  }
  CHECK_THROWS_AS(quantile_contour(polar_one, 0.0, 12), std::invalid_argument);
  CHECK_THROWS_AS(quantile_contour(polar_one, 1.5, 12), std::invalid_argument);
  CHECK_THROWS_AS(quantile_contour(est, 0.5, 12), std::invalid_argument);
  CHECK_THROWS_AS(make_estimator(GridSpec({4}), kQuad, 0.1, one, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("map is minus the gradient of the double conjugate, shifted by x") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  auto est = random_estimator(rng, 2, 25, 0.05);
  for (int t = 0; t < 10; ++t) {
    std::vector<double> x{u(rng), u(rng)};
    auto q = evaluate_map(est, x);
    for (std::size_t k = 0; k < 2; ++k) {
      auto xp = x, xm = x;
      xp[k] += 1e-6;
      xm[k] -= 1e-6;
      const double grad = (double_conjugate(est, xp) - double_conjugate(est, xm)) / 2e-6;
      const double expect = x[k] - q[k];
      CHECK(std::abs(grad - expect) <= 1e-3 * std::max(std::abs(expect), 1e-3));
    }
  }
}

TEST_CASE("one-dimensional maps are monotone") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 5; ++t) {
    auto est = random_estimator(rng, 1, 40, 0.02);
    double prev = -1e300;
    for (int i = 0; i < 128; ++i) {
      const double y = evaluate_map(est, std::vector<double>{i / 128.0})[0];
      CHECK(y >= prev);
      prev = y;
    }
  }
}

TEST_CASE("self-transport is close to the identity") {
  SolverConfig cfg;
  cfg.epsilon = 0.005;
  cfg.gamma = 0.005;
  cfg.grid = GridSpec({32});
  cfg.max_iters = 100000;
  std::vector<double> pts(32);
  for (int i = 0; i < 32; ++i) pts[i] = i / 32.0;
  ObservationSet Y(1, pts);
  auto r = run(cfg, Y);
  auto est = build_estimator(DualState(r.state.coeffs, cfg.epsilon, cfg.cost), Y);
  double dev = 0.0;
  for (int q = 0; q < 64; ++q) {
    const double x = (q + 0.5) / 64.0;
    dev += std::abs(evaluate_map(est, std::vector<double>{x})[0] - x) / 64.0;
  }
  CHECK(dev <= 0.05);
}

TEST_CASE("polar potential interpolation") {
  const auto est = polar_fit(0.05, 100000);
  const std::size_t pr = 10, pa = 100;
  for (std::size_t i = 0; i < pr; i += 3)
    for (std::size_t j = 0; j < pa; j += 17)
      CHECK(polar_potential(est, i / 10.0, j / 100.0) == doctest::Approx(est.potential[i * pa + j]).epsilon(1e-12));
  CHECK(polar_potential(est, 0.35, 1.25) == doctest::Approx(polar_potential(est, 0.35, 0.25)).epsilon(1e-12));
  CHECK(cartesian_potential(est, std::vector<double>{0.0, 0.0}) == doctest::Approx(est.potential[0]));
  CHECK(cartesian_potential(est, std::vector<double>{0.0, 0.5}) == doctest::Approx(polar_potential(est, 0.5, 0.25)));
  CHECK_THROWS_AS(cartesian_potential(est, std::vector<double>{0.9, 0.9}), std::invalid_argument);

  // Trigonometric interpolation onto a 4x finer grid, then bilinear there.
  auto fine_fs = FrequencySet::make(GridSpec({4 * pr, 4 * pa}));
  auto fine = CoefficientVector::zeros(fine_fs);
  const auto& fs = *est.coeffs.freqs;
  for (std::size_t l = 0; l < fs.size(); ++l) {
    auto lam = fs.frequency(l);
    fine[fine_fs->index_of(lam)] += est.coeffs[l];
  }
  symmetrize(fine.coeffs, *fine_fs);
  auto refined = est;
  refined.grid = fine_fs->grid();
  refined.potential = inverse_transform(fine).values;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  // r stays below the last radial node: past it the series wraps to r = 0 while bilinear clamps.
  for (int t = 0; t < 200; ++t) {
    const double r = 0.9 * u(rng), psi = u(rng);
    CHECK(std::abs(polar_potential(est, r, psi) - polar_potential(refined, r, psi)) < 1e-2);
  }
}

TEST_CASE("contours of the spherical uniform are circles") {
  const auto est = polar_fit(0.005, 20000);
  auto c = quantile_contour(est, 0.5, 64);
  double worst = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) worst = std::max(worst, std::abs(std::hypot(c.points[2 * k], c.points[2 * k + 1]) - 0.5));
  CHECK(worst <= 0.1);
  auto cart = evaluate_map_cartesian(est, std::vector<double>{0.5, 0.0});
  CHECK(std::hypot(cart[0], cart[1]) == doctest::Approx(0.5).epsilon(0.3));
}

TEST_CASE("serialization") {
  std::mt19937_64 rng(6);
  auto est = random_estimator(rng, 2, 7, 0.03);
  est.cost.squared_torus = true;
  std::stringstream ss;
  ss.precision(17);
  save_estimator(ss, est);
  auto back = load_estimator(ss);
  CHECK(back.epsilon == est.epsilon);
  CHECK(back.cost.kind == est.cost.kind);
  CHECK(back.cost.squared_torus);
  CHECK(back.grid == est.grid);
  CHECK(back.observations.data() == est.observations.data());
  CHECK(back.conjugates == est.conjugates);
  CHECK(back.potential == est.potential);
  for (std::size_t i = 0; i < est.coeffs.size(); ++i) CHECK(back.coeffs[i] == est.coeffs[i]);
  std::vector<double> x{0.4, 0.6};
  CHECK(evaluate_map(back, x) == evaluate_map(est, x));

  std::istringstream junk("{\"format\":\"other\"}"), broken("{");
  CHECK_THROWS_AS(load_estimator(junk), std::runtime_error);
  CHECK_THROWS_AS(load_estimator(broken), std::runtime_error);
}

TEST_CASE("contour csv") {
  QuantileContour a{0.5, {0.1, 0.2, 0.3, 0.4}};
  std::vector<QuantileContour> cs{a};
  std::stringstream ss;
  write_contours_csv(ss, cs);
  CHECK(ss.str() == "level,angle_index,x,y\n0.5,0,0.10000000000000001,0.20000000000000001\n"
                    "0.5,1,0.29999999999999999,0.40000000000000002\n");
}

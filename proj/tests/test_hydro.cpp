#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "epsim/hydro.hpp"
#include "epsim/monitors.hpp"

using namespace epsim;

namespace {

DeviceProfile flat_profile(const Grid1D& grid, double a, double b, double e_minus) {
  return make_profile(grid, std::vector<double>(grid.n_cells, a),
                      std::vector<double>(grid.n_cells, b), e_minus);
}

HydroState uniform(const Grid1D& grid, double rho, double mom) {
  HydroState s;
  s.rho.assign(grid.n_cells, rho);
  s.mom.assign(grid.n_cells, mom);
  return s;
}

}  // namespace

TEST_SUITE("hydro") {

TEST_CASE("flux examples") {
  const GasModel g(2.0, 0.05);
  auto f = flux(g, 1.0, 0.0);
  CHECK(f.mass == doctest::Approx(0.0));
  CHECK(f.momentum == doctest::Approx(0.405));
  f = flux(g, 1.0, 2.0);
  CHECK(f.mass == doctest::Approx(0.9 * 2.0));
  CHECK(f.momentum == doctest::Approx(4.0 - 0.05 * 4.0 + 0.405));
  f = flux(g, 0.1, 0.0);
  CHECK(f.mass == 0.0);
  CHECK(f.momentum == 0.0);
}

TEST_CASE("time step bounds") {
  const Grid1D grid(0.0, 1.0, 100);
  SolverConfig cfg;
  cfg.cfl = 0.5;
  cfg.epsilon = 0.01;
  for (double s : {0.0, 0.1, 1.0, 10.0}) {
    const double dt = stable_time_step(s, cfg, grid);
    const double dx = grid.dx();
    CHECK(dt > 0.0);
    if (s > 0.0) CHECK(dt <= cfg.cfl * dx / s * (1.0 + 1e-15));
    CHECK(dt <= cfg.cfl * dx * dx / (2.0 * cfg.epsilon) * (1.0 + 1e-15));
  }
}

TEST_CASE("equilibrium is a fixed point") {
  const Grid1D grid(0.0, 1.0, 50);
  const GasModel g(2.0, 0.01);
  const auto p = flat_profile(grid, 1.0, 0.5, 0.0);
  auto s = uniform(grid, g.vacuum() + 0.5, 0.0);
  SolverConfig cfg;
  for (int k = 0; k < 50; ++k) s = step(s, p, g, cfg, grid).first;
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    CHECK(s.rho[i] == doctest::Approx(g.vacuum() + 0.5).epsilon(1e-13));
    CHECK(std::abs(s.mom[i]) < 1e-13);
  }
}

TEST_CASE("damping is integrated exactly") {
  const Grid1D grid(0.0, 1.0, 32, Boundary::Periodic);
  const GasModel g(2.0, 0.01);
  const double rho = g.vacuum() + 0.5;
  const auto p = flat_profile(grid, 2.0, 0.5, 0.0);
  SolverConfig cfg;
  cfg.tau = 0.1;
  const auto s = uniform(grid, rho, 0.3);
  const double dt = 0.05;
  const auto next = step_with_dt(s, p, g, cfg, grid, dt).first;
  for (double m : next.mom) {
    CHECK(m == doctest::Approx(0.3 * std::exp(-2.0 * dt / 0.1)).epsilon(1e-12));
  }
}

TEST_CASE("periodic runs conserve mass") {
  const Grid1D grid(0.0, 1.0, 80, Boundary::Periodic);
  const GasModel g(1.4, 0.01);
  const auto p = flat_profile(grid, 1.0, 0.6, 0.0);
  HydroState s;
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    const double x = grid.center(i);
    s.rho.push_back(g.vacuum() + 0.6 + 0.3 * std::sin(2.0 * M_PI * x));
    s.mom.push_back(0.2 * std::cos(2.0 * M_PI * x));
  }
  const double m0 = monitor_mass(s, g, grid);
  SolverConfig cfg;
  cfg.t_end = 0.3;
  const auto out = run(s, p, g, cfg, grid, nullptr);
  CHECK(out.complete);
  CHECK(monitor_mass(out.final_state, g, grid) == doctest::Approx(m0).epsilon(1e-12));
}

TEST_CASE("positivity is preserved on a near-vacuum bump") {
  const Grid1D grid(0.0, 1.0, 100);
  const GasModel g(2.0, 0.01);
  const auto p = flat_profile(grid, 1.0, 0.0, 0.0);
  HydroState s;
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    const double x = grid.center(i);
    s.rho.push_back(g.vacuum() + std::exp(-200.0 * (x - 0.5) * (x - 0.5)));
    s.mom.push_back(0.0);
  }
  SolverConfig cfg;
  cfg.t_end = 0.5;
  const auto out = run(s, p, g, cfg, grid, nullptr);
  CHECK(out.complete);
  CHECK(out.min_rho >= g.vacuum() * (1.0 - 1e-12));
}

TEST_CASE("run lands on stop times") {
  const Grid1D grid(0.0, 1.0, 40);
  const GasModel g(2.0, 0.01);
  const auto p = flat_profile(grid, 1.0, 0.5, 0.0);
  SolverConfig cfg;
  cfg.t_end = 0.1;
  std::vector<double> seen;
  const std::vector<double> stops{0.0123, 0.05};
  run(uniform(grid, g.vacuum() + 0.5, 0.0), p, g, cfg, grid,
      [&](const HydroState& s, const ElectricField&, long) { seen.push_back(s.time); },
      1000000, stops);
  CHECK(std::count(seen.begin(), seen.end(), 0.0123) == 1);
  CHECK(std::count(seen.begin(), seen.end(), 0.05) == 1);
  CHECK(seen.back() == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("prepare_initial shifts and preserves mass") {
  const Grid1D grid(0.0, 1.0, 200);
  const GasModel g(2.0, 0.02);
  std::vector<double> raw(200), u(200, 0.1);
  for (std::size_t i = 0; i < 200; ++i) {
    const double x = grid.center(i);
    raw[i] = std::exp(-100.0 * (x - 0.5) * (x - 0.5));
  }
  SolverConfig cfg;
  auto s = prepare_initial(raw, u, g, cfg, grid);
  for (std::size_t i = 0; i < 200; ++i) CHECK(s.rho[i] == raw[i] + g.vacuum());
  cfg.smoothing_width = 0.02;
  s = prepare_initial(raw, u, g, cfg, grid);
  const double raw_mass = std::accumulate(raw.begin(), raw.end(), 0.0) * grid.dx();
  CHECK(monitor_mass(s, g, grid) == doctest::Approx(raw_mass).epsilon(1e-8));
  for (double r : s.rho) CHECK(r >= g.vacuum());
}

TEST_CASE("invalid configs") {
  SolverConfig cfg;
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SolverConfig{};
  cfg.cfl = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(parse_flux_scheme("upwind"), ConfigError);
}

}  // TEST_SUITE

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "epsim/field.hpp"

using namespace epsim;

namespace {

HydroState state_from(const GasModel& g, const Grid1D& grid, double (*excess)(double)) {
  HydroState s;
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    s.rho.push_back(g.vacuum() + excess(grid.center(i)));
    s.mom.push_back(0.0);
  }
  return s;
}

DeviceProfile flat_profile(const Grid1D& grid, double b, double e_minus) {
  return make_profile(grid, std::vector<double>(grid.n_cells, 1.0),
                      std::vector<double>(grid.n_cells, b), e_minus);
}

}  // namespace

TEST_SUITE("field") {

TEST_CASE("zero source keeps the left datum") {
  const Grid1D grid(0.0, 1.0, 40);
  const GasModel g(2.0, 0.01);
  const auto s = state_from(g, grid, [](double) { return 0.0; });
  const auto f = solve_field(s, flat_profile(grid, 0.0, 0.5), g, grid);
  for (double e : f.e_vals) CHECK(e == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("indicator charge gives a clamped ramp") {
  const Grid1D grid(-1.0, 2.0, 300);
  const GasModel g(2.0, 0.01);
  const auto s = state_from(g, grid, [](double x) { return (x > 0.0 && x < 1.0) ? 1.0 : 0.0; });
  const auto f = solve_field(s, flat_profile(grid, 0.0, 0.0), g, grid);
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    const double x = grid.center(i);
    CHECK(f.e_vals[i] == doctest::Approx(std::clamp(x, 0.0, 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("neutral charge leaves the datum") {
  const Grid1D grid(0.0, 1.0, 50);
  const GasModel g(2.0, 0.01);
  const auto s = state_from(g, grid, [](double) { return 0.7; });
  const auto f = solve_field(s, flat_profile(grid, 0.7, -0.25), g, grid);
  for (double e : f.e_vals) CHECK(e == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("field bound from ingredients") {
  CHECK(field_bound(1.0, 2.0, 0.5) == doctest::Approx(3.5));
  CHECK(field_bound(-1.0, 2.0, 0.5) == doctest::Approx(3.5));
}

TEST_CASE("field bound covers the solved field") {
  const Grid1D grid(0.0, 1.0, 80);
  const GasModel g(2.0, 0.01);
  const auto s = state_from(g, grid, [](double x) { return std::exp(-50.0 * (x - 0.4) * (x - 0.4)); });
  const auto p = flat_profile(grid, 0.3, 0.2);
  const auto f = solve_field(s, p, g, grid);
  const double bound = field_bound(s, p, g, grid);
  for (double e : f.e_vals) CHECK(std::abs(e) <= bound + 1e-14);
}

TEST_CASE("field is affine in the excess density") {
  const Grid1D grid(0.0, 1.0, 64);
  const GasModel g(2.0, 0.01);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  HydroState a, b, c;
  for (std::size_t i = 0; i < 64; ++i) {
    const double ra = unit(rng), rb = unit(rng);
    a.rho.push_back(g.vacuum() + ra);
    b.rho.push_back(g.vacuum() + rb);
    c.rho.push_back(g.vacuum() + 2.0 * ra + 3.0 * rb);
  }
  a.mom = b.mom = c.mom = std::vector<double>(64, 0.0);
  const auto p = flat_profile(grid, 0.0, 0.0);
  const auto fa = solve_field(a, p, g, grid);
  const auto fb = solve_field(b, p, g, grid);
  const auto fc = solve_field(c, p, g, grid);
  for (std::size_t i = 0; i < 64; ++i) {
    CHECK(fc.e_vals[i] == doctest::Approx(2.0 * fa.e_vals[i] + 3.0 * fb.e_vals[i]).epsilon(1e-12));
  }
}

TEST_CASE("shape mismatch") {
  const Grid1D grid(0.0, 1.0, 16);
  const GasModel g(2.0, 0.01);
  HydroState s;
  s.rho.assign(10, 1.0);
  s.mom.assign(10, 0.0);
  CHECK_THROWS_AS(solve_field(s, flat_profile(grid, 0.0, 0.0), g, grid), ShapeError);
}

}  // TEST_SUITE

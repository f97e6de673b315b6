#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "epsim/model.hpp"

using namespace epsim;

namespace {

double p1_oracle(const GasModel& g, double rho) {
  const double v = g.vacuum();
  auto integrand = [&](double t) {
    return (t - v) / t * g.pressure_derivative(t);
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, v, rho, 15, 1e-14);
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("pressure examples") {
  CHECK(pressure(GasModel(1.0, 0.0), 3.0) == doctest::Approx(3.0));
  CHECK(pressure(GasModel(2.0, 0.0, PressureLaw::OneOverGamma), 2.0) ==
        doctest::Approx(2.0));
  CHECK(GasModel(2.0, 0.0, PressureLaw::Plain).pressure(2.0) == doctest::Approx(4.0));
}

TEST_CASE("perturbed pressure closed forms") {
  const GasModel iso(1.0, 0.05);
  CHECK(iso.perturbed_pressure(1.0) ==
        doctest::Approx(1.0 - 0.1 + 0.1 * std::log(0.1)).epsilon(1e-12));
  const GasModel g2(2.0, 0.05);
  CHECK(g2.perturbed_pressure(1.0) == doctest::Approx(0.405).epsilon(1e-12));
  CHECK(g2.perturbed_pressure(0.1) == 0.0);
}

TEST_CASE("perturbed pressure matches quadrature") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double gamma : {1.0, 1.4, 2.0, 3.0}) {
    for (auto law : {PressureLaw::OneOverGamma, PressureLaw::Plain}) {
      for (int k = 0; k < 50; ++k) {
        const double delta = 1e-3 + 0.1 * unit(rng);
        const GasModel g(gamma, delta, law);
        const double rho = g.vacuum() * (1.0 + 1e-6) + 5.0 * unit(rng);
        const double ref = p1_oracle(g, rho);
        CHECK(g.perturbed_pressure(rho) == doctest::Approx(ref).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("perturbed pressure near the vacuum") {
  const GasModel g(1.4, 0.01);
  for (double h : {1e-10, 1e-7, 1e-4}) {
    const double rho = g.vacuum() + h;
    const double ref = p1_oracle(g, rho);
    CHECK(g.perturbed_pressure(rho) == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("perturbed pressure is nondecreasing") {
  const GasModel g(2.0, 0.02);
  double prev = 0.0;
  for (double rho = g.vacuum(); rho < 4.0; rho += 0.013) {
    const double p = g.perturbed_pressure(rho);
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("eigenvalue examples") {
  const GasModel iso(1.0, 0.0);
  auto s = eigenvalues(iso, 1.0, 0.0);
  CHECK(s.lambda1 == doctest::Approx(-1.0));
  CHECK(s.lambda2 == doctest::Approx(1.0));
  const GasModel g3(3.0, 0.0);
  s = eigenvalues(g3, 2.0, 0.0);
  CHECK(s.lambda1 == doctest::Approx(-2.0));
  CHECK(s.lambda2 == doctest::Approx(2.0));
  const GasModel g2(2.0, 0.05);
  s = eigenvalues(g2, 1.0, 0.0);
  CHECK(s.lambda1 == doctest::Approx(-0.9));
  CHECK(s.lambda2 == doctest::Approx(0.9));
  CHECK(s.lambda1 <= s.lambda2);
}

TEST_CASE("riemann invariant examples") {
  const GasModel iso(1.0, 0.0);
  auto zw = riemann_invariants(iso, 1.0, 0.3);
  CHECK(zw.z == doctest::Approx(-0.3));
  CHECK(zw.w == doctest::Approx(0.3));
  const GasModel g2(2.0, 0.0);
  zw = riemann_invariants(g2, 1.0, 0.0);
  CHECK(zw.z == doctest::Approx(2.0));
  CHECK(zw.w == doctest::Approx(2.0));
}

TEST_CASE("riemann invariant identities") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double gamma : {1.0, 1.5, 2.0, 3.0, 4.0}) {
    const GasModel g(gamma, 0.01);
    for (int k = 0; k < 100; ++k) {
      const double rho = g.vacuum() + 0.01 + 3.0 * unit(rng);
      const double u = 4.0 * unit(rng) - 2.0;
      const auto zw = riemann_invariants(g, rho, rho * u);
      CHECK(zw.w - zw.z == doctest::Approx(2.0 * u).epsilon(1e-12));
      const auto up = riemann_invariants(g, rho * 1.01, rho * 1.01 * u);
      CHECK(up.w > zw.w);
      CHECK(up.z > zw.z);
    }
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(GasModel(0.5, 0.01), ConfigError);
  CHECK_THROWS_AS(GasModel(2.0, -0.1), ConfigError);
  const GasModel g(2.0, 0.1);
  CHECK_THROWS_AS(g.perturbed_pressure(0.1), DomainError);
  CHECK_THROWS_AS(g.pressure(-1.0), DomainError);
}

TEST_CASE("damping and doping hypotheses") {
  const Grid1D grid(0.0, 1.0, 50);
  std::vector<double> b(50, 0.5);
  const auto cum = cumulative_integral(b, grid.dx());
  std::vector<double> a(50);
  for (std::size_t i = 0; i < 50; ++i) a[i] = 1.0 - cum[i];
  auto p = make_profile(grid, a, b, 1.0);
  CHECK(p.theorem2_ok);
  for (double c : p.c_vals) CHECK(c == doctest::Approx(1.0));

  p = make_profile(grid, std::vector<double>(50, 1.0), b, 1.0);
  CHECK_FALSE(p.theorem2_ok);

  std::vector<double> rising(50);
  for (std::size_t i = 0; i < 50; ++i) rising[i] = 1.0 + grid.center(i);
  p = make_profile(grid, rising, b, 1.0);
  CHECK_FALSE(p.theorem2_ok);
  CHECK(p.theorem2_violation.find("a' <= 0") != std::string::npos);

  p = make_profile(grid, std::vector<double>(50, 1.0), std::vector<double>(50, 2.0), 1.0);
  CHECK_FALSE(p.theorem2_ok);

  p = make_profile(grid, a, std::vector<double>(50, -0.5), 0.0);
  CHECK(p.theorem2_ok);
}

TEST_CASE("aux field B is nonnegative for decreasing damping") {
  const Grid1D grid(0.0, 1.0, 64);
  const GasModel g(2.0, 0.01);
  std::vector<double> a(64), b(64, 0.3);
  for (std::size_t i = 0; i < 64; ++i) a[i] = 2.0 - grid.center(i);
  const auto p = make_profile(grid, a, b, 1.0);
  HydroState s;
  s.rho.resize(64);
  s.mom.assign(64, 0.0);
  for (std::size_t i = 0; i < 64; ++i) s.rho[i] = g.vacuum() + 0.5 + 0.4 * std::sin(6.0 * grid.center(i));
  const auto aux = build_aux_fields(s, p, g, grid);
  for (double v : aux.B) CHECK(v >= 0.0);
}

}  // TEST_SUITE

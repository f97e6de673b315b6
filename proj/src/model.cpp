#include "epsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epsim {

namespace {

// States are allowed to sit this far below the offset vacuum before an
// operation rejects them; rounding in conservative updates lands there.
double lower_tolerance(double delta) { return 1e-12 * delta; }

double excess(const GasModel& model, double rho, const char* what) {
  double r = rho - model.vacuum();
  if (!(r >= -lower_tolerance(model.delta()))) {
    throw DomainError(std::string(what) + ": density below 2*delta");
  }
  return std::max(r, 0.0);
}

}  // namespace

GasModel::GasModel(double gamma, double delta, PressureLaw law)
    : gamma_(gamma), delta_(delta), law_(law) {
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
    throw ConfigError("gas model: gamma must be >= 1");
  }
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw ConfigError("gas model: delta must be >= 0");
  }
}

double GasModel::coefficient() const {
  return law_ == PressureLaw::Plain ? gamma_ : 1.0;
}

double GasModel::pressure(double rho) const {
  if (!(rho > 0.0)) throw DomainError("pressure: rho must be positive");
  double p = std::pow(rho, gamma_);
  return law_ == PressureLaw::Plain ? p : p / gamma_;
}

double GasModel::pressure_derivative(double rho) const {
  if (!(rho > 0.0)) throw DomainError("pressure: rho must be positive");
  return coefficient() * std::pow(rho, gamma_ - 1.0);
}

double GasModel::pressure_second_derivative(double rho) const {
  if (!(rho > 0.0)) throw DomainError("pressure: rho must be positive");
  if (isothermal()) return 0.0;
  return coefficient() * (gamma_ - 1.0) * std::pow(rho, gamma_ - 2.0);
}

double power_integral(double q, double a, double b) {
  if (!(a >= 0.0) || !(b >= a)) {
    throw DomainError("power_integral: need 0 <= a <= b");
  }
  if (a == b) return 0.0;
  double p = q + 1.0;
  if (a == 0.0) {
    if (!(p > 0.0)) throw DomainError("power_integral: divergent at 0");
    return std::pow(b, p) / p;
  }
  double log_ratio = std::log(b / a);
  if (p == 0.0) return log_ratio;
  return std::pow(a, p) * std::expm1(p * log_ratio) / p;
}

double GasModel::perturbed_pressure(double rho) const {
  double r = excess(*this, rho, "perturbed_pressure");
  if (delta_ == 0.0) return pressure(rho);
  if (r == 0.0) return 0.0;

  const double a = vacuum();
  const double c = coefficient();
  const double h = r / a;

  if (h < 0.25) {
    // c a^gamma int_0^h v (1+v)^(gamma-2) dv, expanded binomially; avoids the
    // cancellation of the closed form right above the offset.
    const double k = gamma_ - 2.0;
    double binom = 1.0;
    double hp = h * h;
    double sum = 0.0;
    for (int n = 0; n < 400; ++n) {
      double term = binom * hp / (n + 2);
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
      binom *= (k - n) / (n + 1);
      hp *= h;
    }
    return c * std::pow(a, gamma_) * sum;
  }
  if (isothermal()) {
    return c * (r - a * std::log1p(h));
  }
  return c * (power_integral(gamma_ - 1.0, a, rho) -
              a * power_integral(gamma_ - 2.0, a, rho));
}

double GasModel::energy_integral(double rho) const {
  excess(*this, rho, "energy_integral");
  const double lo = std::min(rho, vacuum());
  double k = law_ == PressureLaw::Plain ? 1.0 : 1.0 / gamma_;
  return k * power_integral(gamma_ - 2.0, lo, rho);
}

double GasModel::riemann_lower_limit() const {
  if (isothermal()) return 1.0;
  if (gamma_ >= 3.0) return vacuum();
  return 0.0;
}

double GasModel::riemann_potential(double rho) const {
  excess(*this, rho, "riemann_potential");
  const double root_c = std::sqrt(coefficient());
  if (isothermal()) return root_c * std::log(rho);
  const double l = std::min(riemann_lower_limit(), rho);
  return root_c * power_integral(theta() - 1.0, l, rho);
}

const char* to_string(PressureLaw law) {
  return law == PressureLaw::Plain ? "plain" : "one_over_gamma";
}

PressureLaw parse_pressure_law(const std::string& text) {
  if (text == "plain") return PressureLaw::Plain;
  if (text == "one_over_gamma") return PressureLaw::OneOverGamma;
  throw ConfigError("unknown pressure law '" + text + "'");
}

double pressure(const GasModel& model, double rho) {
  return model.pressure(rho);
}

double perturbed_pressure(const GasModel& model, double rho) {
  return model.perturbed_pressure(rho);
}

WaveSpeeds eigenvalues(const GasModel& model, double rho, double mom) {
  double r = excess(model, rho, "eigenvalues");
  double u = mom / rho;
  double c = r / rho * std::sqrt(model.pressure_derivative(rho));
  return {u - c, u + c};
}

RiemannPair riemann_invariants(const GasModel& model, double rho, double mom) {
  double phi = model.riemann_potential(rho);
  double u = mom / rho;
  return {phi - u, phi + u};
}

RiemannPair riemann_invariants(const GasModel& model, double rho, double mom,
                               double lower_ref) {
  if (lower_ref != model.riemann_lower_limit()) {
    throw ConfigError("riemann_invariants: lower limit does not match gamma");
  }
  return riemann_invariants(model, rho, mom);
}

// ---------------------------------------------------------------------------

const char* to_string(Boundary b) {
  return b == Boundary::Periodic ? "periodic" : "outflow";
}

Boundary parse_boundary(const std::string& text) {
  if (text == "outflow") return Boundary::Outflow;
  if (text == "periodic") return Boundary::Periodic;
  throw ConfigError("unknown boundary '" + text + "'");
}

Grid1D::Grid1D(double lo, double hi, std::size_t n, Boundary bc)
    : x_min(lo), x_max(hi), n_cells(n), boundary(bc) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ConfigError("grid: need x_max > x_min");
  }
  if (n < 8) throw ConfigError("grid: need at least 8 cells");
}

std::vector<double> Grid1D::centers() const {
  std::vector<double> x(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) x[i] = center(i);
  return x;
}

Grid1D Grid1D::refined(std::size_t factor) const {
  return {x_min, x_max, n_cells * factor, boundary};
}

void validate_state(const HydroState& state, const GasModel& model,
                    const Grid1D& grid) {
  if (state.rho.size() != grid.n_cells || state.mom.size() != grid.n_cells) {
    throw ShapeError("state does not conform to grid");
  }
  const double floor = model.vacuum() - lower_tolerance(model.delta());
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (!std::isfinite(state.rho[i]) || !std::isfinite(state.mom[i])) {
      throw DomainError("state has non-finite entries");
    }
    if (state.rho[i] < floor) {
      throw DomainError("state density below 2*delta");
    }
  }
}

HydroState vacuum_state(const GasModel& model, const Grid1D& grid) {
  HydroState s;
  s.rho.assign(grid.n_cells, model.vacuum());
  s.mom.assign(grid.n_cells, 0.0);
  return s;
}

// ---------------------------------------------------------------------------

std::vector<double> cumulative_integral(std::span<const double> values,
                                        double dx) {
  std::vector<double> out(values.size());
  double running = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = running + 0.5 * values[i] * dx;
    running += values[i] * dx;
  }
  return out;
}

std::vector<double> derivative(std::span<const double> values, double dx) {
  const std::size_t n = values.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  d[0] = (values[1] - values[0]) / dx;
  d[n - 1] = (values[n - 1] - values[n - 2]) / dx;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d[i] = (values[i + 1] - values[i - 1]) / (2.0 * dx);
  }
  return d;
}

DeviceProfile make_profile(const Grid1D& grid, std::vector<double> a,
                           std::vector<double> b, double e_minus) {
  if (a.size() != grid.n_cells || b.size() != grid.n_cells) {
    throw ShapeError("profile does not conform to grid");
  }
  DeviceProfile p;
  p.a_vals = std::move(a);
  p.b_vals = std::move(b);
  p.e_minus = e_minus;

  auto doping = cumulative_integral(p.b_vals, grid.dx());
  p.c_vals.resize(grid.n_cells);
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    p.c_vals[i] = (e_minus - doping[i]) / p.a_vals[i];
  }
  auto check = validate_theorem2(p, grid);
  p.theorem2_ok = check.ok;
  p.theorem2_violation = check.violation;
  return p;
}

Theorem2Check validate_theorem2(const DeviceProfile& profile,
                                const Grid1D& grid) {
  const auto& a = profile.a_vals;
  const auto& b = profile.b_vals;
  const auto& c = profile.c_vals;
  const double dx = grid.dx();
  auto fail = [](std::string why) { return Theorem2Check{false, std::move(why)}; };

  if (a.size() != grid.n_cells || b.size() != grid.n_cells ||
      c.size() != grid.n_cells) {
    return fail("profile does not conform to grid");
  }
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i]) || !std::isfinite(c[i])) {
      return fail("profile has non-finite entries");
    }
  }

  double b_scale = 0.0;
  double b_total = 0.0;
  bool b_nonpositive = true;
  for (double v : b) {
    b_scale = std::max(b_scale, std::abs(v));
    b_total += v * dx;
    if (v > 0.0) b_nonpositive = false;
  }
  // b <= 0 everywhere waives both doping conditions.
  if (!b_nonpositive) {
    for (double v : b) {
      if (v < -1e-12 * b_scale) return fail("b >= 0 violated");
    }
    if (!(b_total < profile.e_minus)) return fail("int b < E_- violated");
  }

  const auto [a_lo_it, a_hi_it] = std::minmax_element(a.begin(), a.end());
  const double a0 = *a_lo_it;
  const double a_max = *a_hi_it;
  if (!(a0 > 0.0)) return fail("a >= a0 > 0 violated");

  const double tol_a = 1e-10 * std::max(std::abs(a_max), 1e-300);
  for (double v : derivative(a, dx)) {
    if (v > tol_a) return fail("a' <= 0 violated");
  }

  double c_scale = 0.0;
  for (double v : c) c_scale = std::max(c_scale, std::abs(v));
  const double tol_c = 1e-10 * std::max(c_scale, 1e-300);
  for (double v : derivative(c, dx)) {
    if (v < -tol_c) return fail("C' >= 0 violated");
  }

  if (!b_nonpositive) {
    const double lo = (profile.e_minus - b_total) / a_max;
    const double hi = profile.e_minus / a0;
    for (double v : c) {
      if (v < lo - tol_c || v > hi + tol_c) {
        return fail("C outside [(E_- - int b)/M, E_-/a0]");
      }
    }
  }
  return {true, {}};
}

AuxFields build_aux_fields(const HydroState& state,
                           const DeviceProfile& profile, const GasModel& model,
                           const Grid1D& grid) {
  const std::size_t n = grid.n_cells;
  if (state.size() != n || profile.a_vals.size() != n) {
    throw ShapeError("aux fields: arrays do not conform to grid");
  }
  std::vector<double> excess_rho(n);
  for (std::size_t i = 0; i < n; ++i) {
    excess_rho[i] = state.rho[i] - model.vacuum();
  }
  AuxFields aux;
  aux.cumulative_charge = cumulative_integral(excess_rho, grid.dx());
  auto da = derivative(profile.a_vals, grid.dx());
  aux.A.resize(n);
  aux.B.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = profile.a_vals[i];
    const double q = aux.cumulative_charge[i];
    aux.A[i] = q / a + profile.c_vals[i];
    aux.B[i] = -da[i] / (a * a) * q;
  }
  return aux;
}

}  // namespace epsim

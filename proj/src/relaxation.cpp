#include "epsim/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "epsim/field.hpp"
#include "epsim/monitors.hpp"

namespace epsim {

ScaledTrajectory rescale(const Trajectory& trajectory, double tau, double delta,
                         std::span<const double> s_instants) {
  if (!(tau > 0.0)) throw ConfigError("rescale: tau must be > 0");
  const auto& states = trajectory.states;
  if (states.empty()) throw RangeError("rescale: empty trajectory");
  if (trajectory.fields.size() != states.size()) {
    throw ShapeError("rescale: trajectory lacks a field per state");
  }
  const double horizon = states.back().time;

  ScaledTrajectory out;
  out.tau = tau;
  out.delta = delta;
  for (double s : s_instants) {
    const double t = s / tau;
    if (t > horizon + 1e-9 * std::max(1.0, horizon) || s < 0.0) {
      throw RangeError("rescale: s = " + std::to_string(s) +
                       " lies beyond the recorded horizon");
    }
    std::size_t best = 0;
    double gap = std::abs(states[0].time - t);
    for (std::size_t k = 1; k < states.size(); ++k) {
      const double g = std::abs(states[k].time - t);
      if (g < gap) {
        gap = g;
        best = k;
      }
    }
    const HydroState& st = states[best];
    std::vector<double> J(st.mom.size());
    for (std::size_t i = 0; i < J.size(); ++i) J[i] = st.mom[i] / tau;
    out.s.push_back(s);
    out.N.push_back(st.rho);
    out.J.push_back(std::move(J));
    out.Upsilon.push_back(trajectory.fields[best]);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// P and P' extended to N = 0 for the limit system.
double pressure0(const GasModel& model, double n) {
  return n > 0.0 ? model.pressure(n) : 0.0;
}

double pressure_derivative0(const GasModel& model, double n) {
  if (n > 0.0) return model.pressure_derivative(n);
  return model.isothermal() ? model.pressure_derivative(1.0) : 0.0;
}

// Field at the n + 1 faces, face k sitting left of cell k.
std::vector<double> face_field(std::span<const double> N,
                               const DeviceProfile& profile, double dx) {
  std::vector<double> f(N.size() + 1);
  double running = profile.e_minus;
  f[0] = running;
  for (std::size_t i = 0; i < N.size(); ++i) {
    running += (N[i] - profile.b_vals[i]) * dx;
    f[i + 1] = running;
  }
  return f;
}

// Flux through the face between cells l and r with face field ups.
double face_flux(double Nl, double Nr, double Pl, double Pr, double al,
                 double ar, double ups, const GasModel& model, double dx) {
  const double dN = Nr - Nl;
  const double secant = std::abs(dN) > 1e-14 * std::max(1.0, std::abs(Nl))
                            ? (Pr - Pl) / dN
                            : pressure_derivative0(model, 0.5 * (Nl + Nr));
  const double peclet = std::abs(ups) * dx / (2.0 * std::max(secant, 1e-300));
  double Nf;
  if (peclet <= 1.0) {
    Nf = 0.5 * (Nl + Nr);
  } else {
    Nf = ups > 0.0 ? Nl : Nr;
  }
  return (Nf * ups - (Pr - Pl) / dx) / (0.5 * (al + ar));
}

void face_fluxes(std::span<const double> N, const DeviceProfile& profile,
                 const GasModel& model, const Grid1D& grid,
                 std::vector<double>& P, std::vector<double>& J) {
  const std::size_t n = N.size();
  const double dx = grid.dx();
  const bool periodic = grid.boundary == Boundary::Periodic;
  const auto& a = profile.a_vals;
  P.resize(n);
  J.resize(n + 1);
  for (std::size_t i = 0; i < n; ++i) P[i] = pressure0(model, N[i]);

  double ups = profile.e_minus;
  const double ups0 = ups;
  for (std::size_t k = 1; k < n; ++k) {
    ups += (N[k - 1] - profile.b_vals[k - 1]) * dx;
    J[k] = face_flux(N[k - 1], N[k], P[k - 1], P[k], a[k - 1], a[k], ups, model, dx);
  }
  ups += (N[n - 1] - profile.b_vals[n - 1]) * dx;
  if (periodic) {
    J[0] = face_flux(N[n - 1], N[0], P[n - 1], P[0], a[n - 1], a[0], ups0, model, dx);
    J[n] = J[0];
  } else {
    J[0] = face_flux(N[0], N[0], P[0], P[0], a[0], a[0], ups0, model, dx);
    J[n] = face_flux(N[n - 1], N[n - 1], P[n - 1], P[n - 1], a[n - 1], a[n - 1],
                     ups, model, dx);
  }
}

std::vector<double> face_fluxes(std::span<const double> N,
                                const DeviceProfile& profile,
                                const GasModel& model, const Grid1D& grid) {
  std::vector<double> P, J;
  face_fluxes(N, profile, model, grid, P, J);
  return J;
}

// One explicit update of N in place; false on a negative density.
bool update_density(std::vector<double>& N, const DeviceProfile& profile,
                    const GasModel& model, const Grid1D& grid, double dt_s,
                    std::vector<double>& P, std::vector<double>& J,
                    std::vector<double>& scratch) {
  face_fluxes(N, profile, model, grid, P, J);
  const double dx = grid.dx();
  double scale = 0.0;
  for (double v : N) scale = std::max(scale, std::abs(v));
  scratch.resize(N.size());
  for (std::size_t i = 0; i < N.size(); ++i) {
    const double v = N[i] - dt_s / dx * (J[i + 1] - J[i]);
    if (!std::isfinite(v) || v < -1e-13 * scale) return false;
    scratch[i] = v < 0.0 ? 0.0 : v;
  }
  N.swap(scratch);
  return true;
}

GasModel limit_model(const GasModel& model) { return model.with_delta(0.0); }

}  // namespace

DriftDiffusionState make_drift_diffusion_state(std::vector<double> N,
                                               const DeviceProfile& profile,
                                               const GasModel& model,
                                               const Grid1D& grid) {
  if (N.size() != grid.n_cells || profile.a_vals.size() != grid.n_cells) {
    throw ShapeError("drift-diffusion state does not conform to grid");
  }
  const GasModel lim = limit_model(model);
  DriftDiffusionState st;
  HydroState probe;
  probe.rho = N;
  probe.mom.assign(N.size(), 0.0);
  st.Upsilon = solve_field(probe, profile, lim, grid).e_vals;
  const auto faces = face_fluxes(N, profile, lim, grid);
  st.J.resize(N.size());
  for (std::size_t i = 0; i < N.size(); ++i) st.J[i] = 0.5 * (faces[i] + faces[i + 1]);
  st.N = std::move(N);
  return st;
}

namespace {

double stable_step(std::span<const double> N, const DeviceProfile& profile,
                   const GasModel& model, const Grid1D& grid, double cfl) {
  const double dx = grid.dx();
  const double a_min = *std::min_element(profile.a_vals.begin(), profile.a_vals.end());
  // P' is monotone in N for every supported law
  const double n_max = std::max(0.0, *std::max_element(N.begin(), N.end()));
  const double p_max = pressure_derivative0(model, n_max);
  const auto ups = face_field(N, profile, dx);
  double u_max = 0.0;
  for (double v : ups) u_max = std::max(u_max, std::abs(v));
  const double rate = 2.0 * p_max / (a_min * dx * dx) + u_max / (a_min * dx);
  return rate > 0.0 ? cfl / rate : std::numeric_limits<double>::infinity();
}

}  // namespace

double drift_diffusion_time_step(const DriftDiffusionState& state,
                                 const DeviceProfile& profile,
                                 const GasModel& model, const Grid1D& grid,
                                 double cfl) {
  return stable_step(state.N, profile, model, grid, cfl);
}

DriftDiffusionState drift_diffusion_step(const DriftDiffusionState& state,
                                         const DeviceProfile& profile,
                                         const GasModel& model,
                                         const Grid1D& grid, double dt_s) {
  const GasModel lim = limit_model(model);
  std::vector<double> N = state.N, P, J, scratch;
  if (!update_density(N, profile, lim, grid, dt_s, P, J, scratch)) {
    throw DriftDiffusionFailure("drift-diffusion density went negative");
  }
  DriftDiffusionState next = make_drift_diffusion_state(std::move(N), profile, model, grid);
  next.s = state.s + dt_s;
  return next;
}

DriftDiffusionState advance_to(DriftDiffusionState state, double s_target,
                               const DeviceProfile& profile,
                               const GasModel& model, const Grid1D& grid,
                               double cfl, int max_halvings) {
  const GasModel lim = limit_model(model);
  std::vector<double> N = std::move(state.N), P, J, scratch, trial;
  double s = state.s;
  while (s < s_target) {
    double dt = stable_step(N, profile, lim, grid, cfl);
    const double remaining = s_target - s;
    bool last = false;
    if (dt >= remaining * (1.0 - 1e-12)) {
      dt = remaining;
      last = true;
    }
    for (int attempt = 0;; ++attempt) {
      trial = N;
      if (update_density(trial, profile, lim, grid, dt, P, J, scratch)) break;
      if (attempt >= max_halvings) {
        throw DriftDiffusionFailure("drift-diffusion density went negative at s = " +
                                    std::to_string(s) + " after dt halving");
      }
      dt *= 0.5;
      last = false;
    }
    N.swap(trial);
    s = last ? s_target : s + dt;
  }
  DriftDiffusionState out = make_drift_diffusion_state(std::move(N), profile, model, grid);
  out.s = s;
  return out;
}

// ---------------------------------------------------------------------------

double Coupling::delta(double tau) const {
  return delta_coeff * std::pow(tau, delta_power);
}

double Coupling::epsilon(double tau, const GasModel& model) const {
  const double d = delta(tau);
  const double speed =
      sound_speed_factor ? std::sqrt(model.pressure_derivative(2.0 * d)) : 1.0;
  return eps_coeff * speed * std::pow(tau, eps_power);
}

void RelaxationSetup::validate() const {
  if (!a || !b || !excess0 || !u0) throw ConfigError("relaxation setup: missing profile function");
  if (tau_list.size() < 3) throw ConfigError("relaxation setup: need at least three tau values");
  for (std::size_t k = 0; k < tau_list.size(); ++k) {
    if (!(tau_list[k] > 0.0)) throw ConfigError("relaxation setup: tau must be > 0");
    if (k > 0 && std::abs(tau_list[k] - 0.5 * tau_list[k - 1]) > 1e-12 * tau_list[k - 1]) {
      throw ConfigError("relaxation setup: each tau must halve the previous one");
    }
  }
  if (!(horizon > 0.0)) throw ConfigError("relaxation setup: horizon must be > 0");
  if (!(layer_fraction >= 0.0 && layer_fraction < 1.0)) {
    throw ConfigError("relaxation setup: layer fraction must lie in [0, 1)");
  }
  if (samples < 2) throw ConfigError("relaxation setup: need at least two samples");
  if (reference_refinement < 1) throw ConfigError("relaxation setup: refinement must be >= 1");
  if (!(coupling.delta_coeff > 0.0) || !(coupling.eps_coeff > 0.0)) {
    throw ConfigError("relaxation setup: coupling coefficients must be > 0");
  }
  (void)grid();
}

Grid1D RelaxationSetup::grid() const { return Grid1D(x_min, x_max, n_cells, boundary); }

namespace {

std::vector<double> sample(const ProfileFunction& f, const Grid1D& grid) {
  std::vector<double> v(grid.n_cells);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.center(i));
  return v;
}

DeviceProfile profile_on(const RelaxationSetup& setup, const Grid1D& grid) {
  return make_profile(grid, sample(setup.a, grid), sample(setup.b, grid), setup.e_minus);
}

struct HydroRun {
  ScaledTrajectory scaled;
  long steps = 0;
  bool complete = true;
  std::string failure;
};

HydroRun run_tau(const RelaxationSetup& setup, double tau,
                 std::span<const double> s_instants) {
  const Grid1D grid = setup.grid();
  const double delta = setup.coupling.delta(tau);
  const GasModel model(setup.gamma, delta, setup.law);
  const DeviceProfile profile = profile_on(setup, grid);

  SolverConfig cfg;
  cfg.epsilon = setup.coupling.epsilon(tau, model);
  cfg.tau = tau;
  cfg.cfl = setup.cfl;
  cfg.t_end = setup.horizon / tau;
  cfg.source_variant = SourceVariant::Relaxation41;
  cfg.flux_scheme = setup.flux_scheme;

  const auto raw_rho = sample(setup.excess0, grid);
  const auto raw_u = sample(setup.u0, grid);
  const HydroState initial = prepare_initial(raw_rho, raw_u, model, cfg, grid);

  std::vector<double> stops;
  for (double s : s_instants) stops.push_back(s / tau);

  Trajectory traj;
  auto observer = [&](const HydroState& st, const ElectricField& field, long) {
    for (double t : stops) {
      if (std::abs(st.time - t) <= 1e-9 * std::max(1.0, t)) {
        if (traj.states.empty() || traj.states.back().time != st.time) {
          traj.states.push_back(st);
          traj.fields.push_back(field.e_vals);
        }
        return;
      }
    }
  };
  const RunOutcome outcome = run(initial, profile, model, cfg, grid, observer,
                                 std::numeric_limits<long>::max(), stops);
  HydroRun out;
  out.steps = outcome.steps;
  out.complete = outcome.complete;
  out.failure = outcome.failure;
  if (outcome.complete) out.scaled = rescale(traj, tau, delta, s_instants);
  return out;
}

}  // namespace

std::vector<std::vector<double>> drift_diffusion_reference(
    const RelaxationSetup& setup, std::span<const double> s_instants) {
  const Grid1D coarse = setup.grid();
  const std::size_t r = setup.reference_refinement;
  const Grid1D fine = coarse.refined(r);
  const GasModel model(setup.gamma, 0.0, setup.law);
  const DeviceProfile profile = profile_on(setup, fine);

  DriftDiffusionState st =
      make_drift_diffusion_state(sample(setup.excess0, fine), profile, model, fine);
  std::vector<std::vector<double>> out;
  for (double s : s_instants) {
    st = advance_to(std::move(st), s, profile, model, fine, setup.dd_cfl);
    std::vector<double> avg(coarse.n_cells, 0.0);
    for (std::size_t i = 0; i < coarse.n_cells; ++i) {
      for (std::size_t k = 0; k < r; ++k) avg[i] += st.N[i * r + k];
      avg[i] /= static_cast<double>(r);
    }
    out.push_back(std::move(avg));
  }
  return out;
}

double relaxation_error(const ScaledTrajectory& scaled,
                        const std::vector<std::vector<double>>& reference,
                        const Grid1D& grid, double s0, double x0, double x1) {
  if (reference.size() != scaled.s.size()) {
    throw ShapeError("relaxation_error: sample counts differ");
  }
  const double dx = grid.dx();
  const double vac = 2.0 * scaled.delta;
  double total = 0.0;
  double prev_s = 0.0, prev_v = 0.0;
  bool have_prev = false;
  for (std::size_t k = 0; k < scaled.s.size(); ++k) {
    if (scaled.s[k] < s0 - 1e-12) continue;
    double v = 0.0;
    for (std::size_t i = 0; i < grid.n_cells; ++i) {
      const double x = grid.center(i);
      if (x < x0 || x > x1) continue;
      v += std::abs((scaled.N[k][i] - vac) - reference[k][i]) * dx;
    }
    if (have_prev) total += 0.5 * (scaled.s[k] - prev_s) * (v + prev_v);
    prev_s = scaled.s[k];
    prev_v = v;
    have_prev = true;
  }
  return total;
}

StudyResult relaxation_study(const RelaxationSetup& setup) {
  setup.validate();
  const Grid1D grid = setup.grid();

  StudyResult result;
  for (int k = 0; k < setup.samples; ++k) {
    result.s_instants.push_back(setup.horizon * k / (setup.samples - 1));
  }
  const std::vector<double>& s_inst = result.s_instants;

  auto reference = std::async(std::launch::async, [&] {
    return drift_diffusion_reference(setup, s_inst);
  });
  std::vector<std::future<HydroRun>> runs;
  for (double tau : setup.tau_list) {
    runs.push_back(std::async(std::launch::async, [&setup, &s_inst, tau] {
      return run_tau(setup, tau, s_inst);
    }));
  }
  result.reference = reference.get();

  const double s0 = setup.layer_fraction * setup.horizon;
  bool all_complete = true;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    HydroRun hr = runs[k].get();
    StudyRow row;
    row.tau = setup.tau_list[k];
    row.delta = setup.coupling.delta(row.tau);
    row.epsilon = setup.coupling.epsilon(row.tau, GasModel(setup.gamma, row.delta, setup.law));
    row.steps = hr.steps;
    row.complete = hr.complete;
    row.failure = hr.failure;
    if (hr.complete) {
      row.l1_error = relaxation_error(hr.scaled, result.reference, grid, s0,
                                      setup.window_lo, setup.window_hi);
      row.dissipation = dissipation_integral(hr.scaled, grid);
    } else {
      row.l1_error = std::numeric_limits<double>::infinity();
      row.dissipation = std::numeric_limits<double>::infinity();
      all_complete = false;
    }
    result.rows.push_back(row);
    result.scaled.push_back(std::move(hr.scaled));
  }

  result.monotone = all_complete;
  for (std::size_t k = 1; k < result.rows.size() && result.monotone; ++k) {
    if (!(result.rows[k].l1_error < result.rows[k - 1].l1_error)) result.monotone = false;
  }
  double dmin = HUGE_VAL, dmax = 0.0;
  for (const auto& row : result.rows) {
    dmin = std::min(dmin, row.dissipation);
    dmax = std::max(dmax, row.dissipation);
  }
  result.dissipation_spread = dmin > 0.0 ? dmax / dmin : HUGE_VAL;
  if (!all_complete) {
    result.message = "a hydro run did not reach L/tau";
  } else if (!result.monotone) {
    result.message = "L1 error is not strictly decreasing in tau";
  }
  return result;
}

}  // namespace epsim

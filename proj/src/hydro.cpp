#include "epsim/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epsim {

const char* to_string(SourceVariant v) {
  return v == SourceVariant::Relaxation41 ? "relaxation" : "original";
}

const char* to_string(FluxScheme f) {
  return f == FluxScheme::Rusanov ? "rusanov" : "llf";
}

SourceVariant parse_source_variant(const std::string& text) {
  if (text == "original") return SourceVariant::Original16;
  if (text == "relaxation") return SourceVariant::Relaxation41;
  throw ConfigError("unknown source variant '" + text + "'");
}

FluxScheme parse_flux_scheme(const std::string& text) {
  if (text == "llf") return FluxScheme::LocalLaxFriedrichs;
  if (text == "rusanov") return FluxScheme::Rusanov;
  throw ConfigError("unknown flux scheme '" + text + "'");
}

void SolverConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("solver: epsilon must be > 0");
  if (!(tau > 0.0)) throw ConfigError("solver: tau must be > 0");
  if (!(cfl > 0.0 && cfl <= 0.9)) throw ConfigError("solver: cfl must be in (0, 0.9]");
  if (!(t_end >= 0.0)) throw ConfigError("solver: t_end must be >= 0");
  if (!(smoothing_width >= 0.0)) {
    throw ConfigError("solver: smoothing_width must be >= 0");
  }
}

namespace {

std::vector<double> mollify(std::span<const double> f, double width,
                            const Grid1D& grid) {
  const double dx = grid.dx();
  const long n = static_cast<long>(f.size());
  if (width <= 1e-3 * dx) return {f.begin(), f.end()};

  const long reach = static_cast<long>(std::ceil(8.0 * width / dx));
  std::vector<double> kernel(2 * reach + 1);
  double total = 0.0;
  for (long k = -reach; k <= reach; ++k) {
    double x = static_cast<double>(k) * dx / width;
    kernel[k + reach] = std::exp(-0.5 * x * x);
    total += kernel[k + reach];
  }
  for (double& w : kernel) w /= total;

  std::vector<double> out(f.size(), 0.0);
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (long k = -reach; k <= reach; ++k) {
      long j = i - k;
      if (grid.boundary == Boundary::Periodic) {
        j = ((j % n) + n) % n;
      } else {
        j = std::clamp(j, 0L, n - 1);
      }
      acc += kernel[k + reach] * f[j];
    }
    out[i] = acc;
  }
  return out;
}

// exp-integrator weight (1 - e^{-z}) / z
double relax_weight(double z) {
  if (z < 1e-8) return 1.0 - 0.5 * z;
  return -std::expm1(-z) / z;
}

}  // namespace

HydroState prepare_initial(std::span<const double> raw_rho,
                           std::span<const double> raw_u,
                           const GasModel& model, const SolverConfig& cfg,
                           const Grid1D& grid) {
  if (raw_rho.size() != grid.n_cells || raw_u.size() != grid.n_cells) {
    throw ShapeError("prepare_initial: arrays do not conform to grid");
  }
  for (double v : raw_rho) {
    if (!(v >= 0.0)) throw DomainError("prepare_initial: negative density");
  }
  auto excess = mollify(raw_rho, cfg.smoothing_width, grid);
  auto u = mollify(raw_u, cfg.smoothing_width, grid);

  HydroState s;
  s.rho.resize(grid.n_cells);
  s.mom.resize(grid.n_cells);
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    s.rho[i] = std::max(excess[i], 0.0) + model.vacuum();
    s.mom[i] = s.rho[i] * u[i];
  }
  return s;
}

FluxPair flux(const GasModel& model, double rho, double mom) {
  const double p1 = model.perturbed_pressure(rho);  // checks rho >= 2 delta
  const double u = mom / rho;
  return {(rho - model.vacuum()) * u, (rho - model.delta()) * u * u + p1};
}

double max_wave_speed(const HydroState& state, const GasModel& model) {
  double s = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    auto [l1, l2] = eigenvalues(model, state.rho[i], state.mom[i]);
    s = std::max({s, std::abs(l1), std::abs(l2)});
  }
  return s;
}

double stable_time_step(double max_speed, const SolverConfig& cfg,
                        const Grid1D& grid) {
  const double dx = grid.dx();
  return cfg.cfl / (max_speed / dx + 2.0 * cfg.epsilon / (dx * dx));
}

std::pair<HydroState, StepReport> step_with_dt(const HydroState& state,
                                               const DeviceProfile& profile,
                                               const GasModel& model,
                                               const SolverConfig& cfg,
                                               const Grid1D& grid, double dt) {
  const std::size_t n = grid.n_cells;
  const double dx = grid.dx();
  const double vac = model.vacuum();
  const bool periodic = grid.boundary == Boundary::Periodic;

  // Cells -1 .. n, boundary values in the ghosts.
  std::vector<double> rho(n + 2), mom(n + 2), speed(n + 2);
  std::vector<FluxPair> f(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    rho[i + 1] = state.rho[i];
    mom[i + 1] = state.mom[i];
  }
  if (periodic) {
    rho[0] = state.rho[n - 1];
    mom[0] = state.mom[n - 1];
    rho[n + 1] = state.rho[0];
    mom[n + 1] = state.mom[0];
  } else {
    rho[0] = state.rho[0];
    mom[0] = state.mom[0];
    rho[n + 1] = state.rho[n - 1];
    mom[n + 1] = state.mom[n - 1];
  }
  double smax = 0.0;
  for (std::size_t i = 0; i < n + 2; ++i) {
    f[i] = flux(model, rho[i], mom[i]);
    auto [l1, l2] = eigenvalues(model, rho[i], mom[i]);
    speed[i] = std::max(std::abs(l1), std::abs(l2));
    smax = std::max(smax, speed[i]);
  }

  // Face k sits between extended cells k and k+1.
  std::vector<double> face_mass(n + 1), face_mom(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double alpha = cfg.flux_scheme == FluxScheme::Rusanov
                             ? smax
                             : std::max(speed[k], speed[k + 1]);
    face_mass[k] = 0.5 * (f[k].mass + f[k + 1].mass) -
                   0.5 * alpha * (rho[k + 1] - rho[k]);
    face_mom[k] = 0.5 * (f[k].momentum + f[k + 1].momentum) -
                  0.5 * alpha * (mom[k + 1] - mom[k]);
  }

  const ElectricField field = solve_field(state, profile, model, grid);
  const double nu = cfg.epsilon / (dx * dx);

  HydroState next;
  next.rho.resize(n);
  next.mom.resize(n);
  next.time = state.time + dt;
  double min_rho = std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i + 1;
    // Excess density keeps the update a convex combination around 2 delta.
    const double r_l = rho[c - 1] - vac;
    const double r_c = rho[c] - vac;
    const double r_r = rho[c + 1] - vac;
    const double dr = -(face_mass[i + 1] - face_mass[i]) / dx +
                      nu * (r_r - 2.0 * r_c + r_l);
    const double r_new = r_c + dt * dr;
    const double rho_new = r_new + vac;

    const double e = field.e_vals[i];
    const double a = profile.a_vals[i];
    double force = -(face_mom[i + 1] - face_mom[i]) / dx +
                   nu * (mom[c + 1] - 2.0 * mom[c] + mom[c - 1]);
    double rate;
    if (cfg.source_variant == SourceVariant::Original16) {
      force += rho[c] * e;
      rate = a / cfg.tau;
    } else {
      force += r_c * e;
      rate = a * std::max(r_new, 0.0) / (rho_new * cfg.tau);
    }
    // m' = force - rate m, force frozen: exact over the step.
    const double z = rate * dt;
    const double m_new = mom[c] * std::exp(-z) + dt * relax_weight(z) * force;

    next.rho[i] = rho_new;
    next.mom[i] = m_new;
    min_rho = std::min(min_rho, rho_new);
    if (!std::isfinite(rho_new) || !std::isfinite(m_new)) {
      throw IntegrationFailure(IntegrationFailure::Kind::NonFinite,
                               "non-finite value after step", state);
    }
  }
  if (min_rho < vac - 1e-12 * model.delta()) {
    throw IntegrationFailure(IntegrationFailure::Kind::Positivity,
                             "density fell below 2*delta", state);
  }

  StepReport report;
  report.dt_used = dt;
  report.max_wave_speed = smax;
  report.post_step_min_rho = min_rho;
  report.source_solve_iterations = 1;
  return {std::move(next), report};
}

std::pair<HydroState, StepReport> step(const HydroState& state,
                                       const DeviceProfile& profile,
                                       const GasModel& model,
                                       const SolverConfig& cfg,
                                       const Grid1D& grid, double dt_cap) {
  const double s = max_wave_speed(state, model);
  const double dt = std::min(stable_time_step(s, cfg, grid), dt_cap);
  return step_with_dt(state, profile, model, cfg, grid, dt);
}

RunOutcome run(const HydroState& initial, const DeviceProfile& profile,
               const GasModel& model, const SolverConfig& cfg,
               const Grid1D& grid, const StateObserver& observer, long cadence,
               std::span<const double> stop_times) {
  cfg.validate();
  validate_state(initial, model, grid);
  if (cadence < 1) cadence = 1;

  RunOutcome out;
  out.final_state = initial;
  out.min_rho = *std::min_element(initial.rho.begin(), initial.rho.end());
  out.min_dt = std::numeric_limits<double>::infinity();

  auto notify = [&](const HydroState& s, long k) {
    if (observer) observer(s, solve_field(s, profile, model, grid), k);
  };
  notify(initial, 0);

  HydroState state = initial;
  const double t_end = cfg.t_end;
  const double eps_t = 1e-12 * std::max(1.0, t_end);
  std::size_t next_stop = 0;
  while (next_stop < stop_times.size() && stop_times[next_stop] <= state.time + eps_t) {
    ++next_stop;
  }

  long k = 0;
  bool last_observed = true;
  try {
    while (t_end - state.time > eps_t) {
      double target = t_end;
      bool at_stop = false;
      if (next_stop < stop_times.size() && stop_times[next_stop] < t_end - eps_t) {
        target = stop_times[next_stop];
        at_stop = true;
      }
      auto [next, report] =
          step(state, profile, model, cfg, grid, target - state.time);
      ++k;
      bool landed = target - next.time <= eps_t;
      if (landed) next.time = target;
      if (landed && at_stop) ++next_stop;

      out.min_rho = std::min(out.min_rho, report.post_step_min_rho);
      out.max_dt = std::max(out.max_dt, report.dt_used);
      out.min_dt = std::min(out.min_dt, report.dt_used);
      state = std::move(next);

      last_observed = (k % cadence == 0) || (landed && at_stop);
      if (last_observed) notify(state, k);
    }
  } catch (const IntegrationFailure& failure) {
    out.complete = false;
    out.failure = failure.what();
    out.failure_time = failure.last_valid().time;
    out.final_state = failure.last_valid();
    out.steps = k;
    return out;
  }
  if (!last_observed) notify(state, k);
  out.steps = k;
  out.final_state = std::move(state);
  if (k == 0) out.min_dt = 0.0;
  return out;
}

}  // namespace epsim

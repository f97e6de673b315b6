#include "epsim/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epsim {

const char* to_string(MonitorId id) {
  switch (id) {
    case MonitorId::Mass: return "mass";
    case MonitorId::Positivity: return "positivity";
    case MonitorId::FieldBound: return "field_bound";
    case MonitorId::RiemannGrowth: return "riemann_growth";
    case MonitorId::UniformBounds: return "uniform_bounds";
  }
  return "?";
}

MonitorId parse_monitor(const std::string& text) {
  for (MonitorId id : all_monitors()) {
    if (text == to_string(id)) return id;
  }
  throw ConfigError("unknown monitor '" + text + "'");
}

std::vector<MonitorId> all_monitors() {
  return {MonitorId::Mass, MonitorId::Positivity, MonitorId::FieldBound,
          MonitorId::RiemannGrowth, MonitorId::UniformBounds};
}

bool MonitorSuite::has(MonitorId id) const {
  return std::find(enabled.begin(), enabled.end(), id) != enabled.end();
}

void MonitorSuite::validate() const {
  if (!(tol.mass_rel > 0 && tol.positivity_rel > 0 && tol.field > 0 &&
        tol.riemann > 0 && tol.plateau > 0)) {
    throw ConfigError("monitor tolerances must be positive");
  }
  if (cadence < 1) throw ConfigError("monitor cadence must be >= 1");
}

// ---------------------------------------------------------------------------

double monitor_mass(const HydroState& state, const GasModel& model,
                    const Grid1D& grid) {
  double mass = 0.0;
  for (double r : state.rho) mass += r - model.vacuum();
  return mass * grid.dx();
}

double monitor_field_bound(const ElectricField& field) {
  double worst = 0.0;
  for (double e : field.e_vals) worst = std::max(worst, std::abs(e));
  if (field.sup_bound == 0.0) return worst == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return worst / field.sup_bound;
}

double max_riemann_invariant(const HydroState& state, const GasModel& model) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.size(); ++i) {
    auto [z, w] = riemann_invariants(model, state.rho[i], state.mom[i]);
    top = std::max({top, z, w});
  }
  return top;
}

double monitor_riemann_growth(const HydroState& state, double field_bound_m1,
                              double initial_bound_m2, const GasModel& model) {
  return initial_bound_m2 + field_bound_m1 * state.time -
         max_riemann_invariant(state, model);
}

UniformBoundSample monitor_uniform_bounds(const HydroState& state,
                                          const GasModel& model) {
  UniformBoundSample s;
  s.time = state.time;
  s.first = -std::numeric_limits<double>::infinity();
  s.second = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double rho = state.rho[i];
    const double u = state.mom[i] / rho;
    if (model.isothermal()) {
      s.first = std::max(s.first, std::log(rho) - u);
      s.second = std::max(s.second, std::log(rho) + u);
    } else {
      s.first = std::max(s.first, rho);
      s.second = std::max(s.second, std::abs(u));
    }
  }
  return s;
}

PlateauResult plateau_statistic(const std::vector<UniformBoundSample>& history,
                                double t_end, double tol, bool theorem2_ok) {
  PlateauResult r;
  r.asserted = theorem2_ok;
  const double inf = std::numeric_limits<double>::infinity();
  r.early_first = r.early_second = -inf;
  r.late_first = r.late_second = -inf;
  const double half = 0.5 * t_end;
  for (const auto& s : history) {
    if (s.time <= half) {
      r.early_first = std::max(r.early_first, s.first);
      r.early_second = std::max(r.early_second, s.second);
    }
    if (s.time >= half) {
      r.late_first = std::max(r.late_first, s.first);
      r.late_second = std::max(r.late_second, s.second);
    }
  }
  auto growth = [](double early, double late) {
    if (!std::isfinite(early) || !std::isfinite(late)) return 0.0;
    double scale = std::abs(early);
    return scale > 0.0 ? (late - early) / scale : late - early;
  };
  r.growth_first = growth(r.early_first, r.late_first);
  r.growth_second = growth(r.early_second, r.late_second);
  r.ok = !theorem2_ok || (r.growth_first < tol && r.growth_second < tol);
  return r;
}

// ---------------------------------------------------------------------------

EntropyPair mechanical_energy_pair(const GasModel& model) {
  EntropyPair pair;
  pair.name = "mechanical_energy";
  pair.convex = true;
  pair.eta = [model](double rho, double m) {
    return m * m / (2.0 * rho) + rho * model.energy_integral(rho);
  };
  pair.q = [model](double rho, double m) {
    return m * m * m / (2.0 * rho * rho) +
           (model.pressure(rho) / rho + model.energy_integral(rho)) * m;
  };
  pair.eta_m = [](double rho, double m) { return m / rho; };
  return pair;
}

double min_hessian_eigenvalue(const EntropyPair& pair, double rho, double mom) {
  const double hr = 1e-4 * rho;
  const double hm = 1e-4 * std::max(std::abs(mom), rho);
  auto f = [&](double r, double m) { return pair.eta(r, m); };
  const double f0 = f(rho, mom);
  const double frr = (f(rho + hr, mom) - 2.0 * f0 + f(rho - hr, mom)) / (hr * hr);
  const double fmm = (f(rho, mom + hm) - 2.0 * f0 + f(rho, mom - hm)) / (hm * hm);
  const double frm = (f(rho + hr, mom + hm) - f(rho + hr, mom - hm) -
                      f(rho - hr, mom + hm) + f(rho - hr, mom - hm)) /
                     (4.0 * hr * hm);
  const double mean = 0.5 * (frr + fmm);
  const double gap = std::sqrt(0.25 * (frr - fmm) * (frr - fmm) + frm * frm);
  return mean - gap;
}

TestFunction bump_test_function(double xc, double hx, double tc, double ht,
                                double amplitude) {
  auto psi = [](double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - s * s));
  };
  auto dpsi = [psi](double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    const double d = 1.0 - s * s;
    return psi(s) * (-2.0 * s / (d * d));
  };
  TestFunction phi;
  phi.value = [=](double x, double t) {
    return amplitude * psi((x - xc) / hx) * psi((t - tc) / ht);
  };
  phi.d_t = [=](double x, double t) {
    return amplitude * psi((x - xc) / hx) * dpsi((t - tc) / ht) / ht;
  };
  phi.d_x = [=](double x, double t) {
    return amplitude * dpsi((x - xc) / hx) / hx * psi((t - tc) / ht);
  };
  return phi;
}

EntropyResidual entropy_residual(const Trajectory& trajectory,
                                 const EntropyPair& pair,
                                 const TestFunction& phi,
                                 const DeviceProfile& profile,
                                 const GasModel& model, const Grid1D& grid,
                                 const SolverConfig& cfg, bool require_convex) {
  if (require_convex && !pair.convex) {
    throw ConfigError("entropy_residual: pair '" + pair.name + "' is not convex");
  }
  const auto& states = trajectory.states;
  EntropyResidual out;
  if (states.size() < 2) return out;

  const double dx = grid.dx();
  const auto x = grid.centers();
  std::vector<double> slice_value(states.size()), slice_abs(states.size());

  for (std::size_t k = 0; k < states.size(); ++k) {
    const HydroState& s = states[k];
    const double t = s.time;
    const ElectricField field = solve_field(s, profile, model, grid);
    double acc = 0.0, acc_abs = 0.0;
    for (std::size_t i = 0; i < grid.n_cells; ++i) {
      const double p = phi.value(x[i], t);
      const double pt = phi.d_t(x[i], t);
      const double px = phi.d_x(x[i], t);
      if (p == 0.0 && pt == 0.0 && px == 0.0) continue;
      const double rho = s.rho[i];
      const double m = s.mom[i];
      const double carrier =
          cfg.source_variant == SourceVariant::Original16 ? rho : rho - model.vacuum();
      const double source = carrier * field.e_vals[i] -
                            profile.a_vals[i] * carrier * (m / rho) / cfg.tau;
      const double t1 = pair.eta(rho, m) * pt;
      const double t2 = pair.q(rho, m) * px;
      const double t3 = source * pair.eta_m(rho, m) * p;
      acc += t1 + t2 + t3;
      acc_abs += std::abs(t1) + std::abs(t2) + std::abs(t3);
    }
    slice_value[k] = acc * dx;
    slice_abs[k] = acc_abs * dx;
  }
  for (std::size_t k = 0; k + 1 < states.size(); ++k) {
    const double h = states[k + 1].time - states[k].time;
    out.value += 0.5 * h * (slice_value[k] + slice_value[k + 1]);
    out.magnitude += 0.5 * h * (slice_abs[k] + slice_abs[k + 1]);
  }
  return out;
}

double entropy_tolerance(double c, double dx, double epsilon, double magnitude) {
  return c * (dx + epsilon) * magnitude;
}

double dissipation_integral(const ScaledTrajectory& trajectory,
                            const Grid1D& grid) {
  const double dx = grid.dx();
  const double vac = 2.0 * trajectory.delta;
  const std::size_t n_t = trajectory.s.size();
  std::vector<double> slice(n_t, 0.0);
  for (std::size_t k = 0; k < n_t; ++k) {
    const auto& N = trajectory.N[k];
    const auto& J = trajectory.J[k];
    double acc = 0.0;
    for (std::size_t i = 0; i < N.size(); ++i) {
      const double U = J[i] / N[i];
      acc += (N[i] - vac) * U * U;
    }
    slice[k] = acc * dx;
  }
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < n_t; ++k) {
    total += 0.5 * (trajectory.s[k + 1] - trajectory.s[k]) * (slice[k] + slice[k + 1]);
  }
  return total;
}

// ---------------------------------------------------------------------------

MonitorRecorder::MonitorRecorder(MonitorSuite suite, const DeviceProfile& profile,
                                 const GasModel& model, const Grid1D& grid)
    : suite_(std::move(suite)), profile_(profile), model_(model), grid_(grid) {
  suite_.validate();
}

void MonitorRecorder::flag(const char* monitor, double time, double value,
                           double bound) {
  report_.violations.push_back({monitor, time, value, bound});
}

void MonitorRecorder::observe(const HydroState& state, long step) {
  observe(state, solve_field(state, profile_, model_, grid_), step);
}

void MonitorRecorder::observe(const HydroState& state, const ElectricField& field,
                              long step) {
  if (!started_) {
    report_.initial_mass = monitor_mass(state, model_, grid_);
    report_.field_bound = field_bound(state, profile_, model_, grid_);
    report_.riemann_m2 = max_riemann_invariant(state, model_);
    previous_mass_ = report_.initial_mass;
    started_ = true;
  }

  MonitorRow row;
  row.step = step;
  row.time = state.time;
  row.mass = monitor_mass(state, model_, grid_);
  row.min_rho = std::numeric_limits<double>::infinity();
  row.sup_rho = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.size(); ++i) {
    row.min_rho = std::min(row.min_rho, state.rho[i]);
    row.sup_rho = std::max(row.sup_rho, state.rho[i]);
    row.sup_abs_u = std::max(row.sup_abs_u, std::abs(state.mom[i] / state.rho[i]));
  }
  ElectricField bounded = field;
  bounded.sup_bound = report_.field_bound;
  for (double e : field.e_vals) row.sup_abs_e = std::max(row.sup_abs_e, std::abs(e));
  row.field_ratio = monitor_field_bound(bounded);
  for (std::size_t i = 0; i < state.size(); ++i) {
    auto [z, w] = riemann_invariants(model_, state.rho[i], state.mom[i]);
    if (i == 0) {
      row.max_z = z;
      row.max_w = w;
    }
    row.max_z = std::max(row.max_z, z);
    row.max_w = std::max(row.max_w, w);
  }
  row.riemann_slack = report_.riemann_m2 + report_.field_bound * state.time -
                      std::max(row.max_z, row.max_w);
  report_.rows.push_back(row);
  report_.uniform_history.push_back(monitor_uniform_bounds(state, model_));

  const auto& tol = suite_.tol;
  const double mass_scale =
      std::max(std::abs(report_.initial_mass), std::numeric_limits<double>::min());
  if (suite_.has(MonitorId::Mass)) {
    if (grid_.boundary == Boundary::Periodic) {
      const double allowed = tol.mass_rel * mass_scale *
                             std::max(1.0, static_cast<double>(step) / 1000.0);
      if (std::abs(row.mass - report_.initial_mass) > allowed) {
        flag("mass", row.time, row.mass, report_.initial_mass);
      }
    } else if (row.mass > previous_mass_ + tol.mass_rel * mass_scale) {
      flag("mass", row.time, row.mass, previous_mass_);
    }
  }
  previous_mass_ = row.mass;
  if (suite_.has(MonitorId::Positivity)) {
    const double floor = model_.vacuum() - tol.positivity_rel * model_.delta();
    if (row.min_rho < floor) flag("positivity", row.time, row.min_rho, floor);
  }
  if (suite_.has(MonitorId::FieldBound) && row.field_ratio > 1.0 + tol.field) {
    flag("field_bound", row.time, row.field_ratio, 1.0);
  }
  if (suite_.has(MonitorId::RiemannGrowth) && row.riemann_slack < -tol.riemann) {
    flag("riemann_growth", row.time, row.riemann_slack, 0.0);
  }
}

void MonitorRecorder::finish(double t_end) {
  if (!suite_.has(MonitorId::UniformBounds)) return;
  report_.plateau = plateau_statistic(report_.uniform_history, t_end,
                                      suite_.tol.plateau, profile_.theorem2_ok);
  const auto& p = *report_.plateau;
  if (p.asserted && !p.ok) {
    flag("uniform_bounds", t_end, std::max(p.growth_first, p.growth_second),
         suite_.tol.plateau);
  }
}

}  // namespace epsim

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <future>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "epsim/commands.hpp"
#include "epsim/io.hpp"
#include "epsim/monitors.hpp"
#include "epsim/picard.hpp"
#include "epsim/relaxation.hpp"
#include "epsim/scenario.hpp"

using namespace epsim;
namespace fs = std::filesystem;

namespace {

// Frozen after one calibration run of the entropy fixture.
constexpr double kEntropyC = 1.0;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

struct LibraryRun {
  Scenario sc;
  RunOutcome outcome;
  RunReport report;
};

LibraryRun run_scenario(RunConfig config, const std::vector<MonitorId>& monitors,
                        long cadence) {
  LibraryRun r{make_scenario(config), {}, {}};
  MonitorSuite suite;
  suite.enabled = monitors;
  suite.cadence = cadence;
  MonitorRecorder rec(suite, r.sc.profile, r.sc.model, r.sc.grid);
  r.outcome = run(r.sc.initial(), r.sc.profile, r.sc.model, r.sc.cfg, r.sc.grid,
                  [&](const HydroState& s, const ElectricField& f, long k) {
                    rec.observe(s, f, k);
                  },
                  cadence);
  rec.finish(r.sc.cfg.t_end);
  r.report = rec.report();
  return r;
}

RunConfig named(const std::string& name, std::size_t n) {
  RunConfig c;
  c.set("scenario", name);
  c.set("n_cells", std::to_string(n));
  return c;
}

std::size_t count(const RunReport& rep, const std::string& monitor) {
  return std::count_if(rep.violations.begin(), rep.violations.end(),
                       [&](const Violation& v) { return v.monitor == monitor; });
}

// Criteria 1-3 share the library runs at both resolutions.
std::vector<LibraryRun> library_runs() {
  std::vector<std::future<LibraryRun>> jobs;
  for (std::size_t n : {50, 100}) {
    for (const auto& name : scenario_names()) {
      jobs.push_back(std::async(std::launch::async, [=] {
        return run_scenario(named(name, n),
                            {MonitorId::Mass, MonitorId::Positivity, MonitorId::FieldBound},
                            1);
      }));
    }
  }
  auto periodic = named("bump", 100);
  periodic.set("boundary", "periodic");
  periodic.set("epsilon", "0.001");
  jobs.push_back(std::async(std::launch::async, [=] {
    return run_scenario(periodic, {MonitorId::Mass, MonitorId::Positivity,
                                   MonitorId::FieldBound}, 1);
  }));
  std::vector<LibraryRun> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

Verdict check_positivity(const std::vector<LibraryRun>& runs) {
  double worst = 1e300;
  bool ok = true;
  for (const auto& r : runs) {
    const double vac = r.sc.model.vacuum();
    const double d = r.sc.model.delta();
    ok = ok && r.outcome.complete && r.outcome.min_rho >= vac - 1e-12 * d;
    worst = std::min(worst, (r.outcome.min_rho - vac) / d);
  }
  return {ok, std::to_string(runs.size()) + " runs, min (rho - 2delta)/delta = " +
                  fmt("%.3e", worst)};
}

Verdict check_mass(const std::vector<LibraryRun>& runs) {
  std::size_t bad = 0;
  double drift = 0.0;
  for (const auto& r : runs) {
    bad += count(r.report, "mass");
    if (r.sc.grid.boundary == Boundary::Periodic) {
      const double m0 = r.report.initial_mass;
      for (const auto& row : r.report.rows) {
        drift = std::max(drift, std::abs(row.mass - m0) / m0);
      }
    }
  }
  return {bad == 0, std::to_string(bad) + " violations, max periodic drift " +
                        fmt("%.2e", drift)};
}

Verdict check_field(const std::vector<LibraryRun>& runs) {
  double margin = 1e300;
  bool ok = true;
  for (const auto& r : runs) {
    double sup = 0.0;
    for (const auto& row : r.report.rows) sup = std::max(sup, row.sup_abs_e);
    const double m = r.report.field_bound - sup;
    ok = ok && m > 0.0 && count(r.report, "field_bound") == 0;
    margin = std::min(margin, m);
  }
  return {ok, "min margin bound - sup|E| = " + fmt("%.4g", margin)};
}

Verdict check_perturbed_pressure() {
  std::mt19937_64 rng(20261019);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0, worst_exact = 0.0;
  for (double gamma : {1.0, 1.4, 2.0, 3.0}) {
    for (int k = 0; k < 1000; ++k) {
      const double delta = 1e-4 + 0.2 * unit(rng);
      const auto law = k % 2 ? PressureLaw::Plain : PressureLaw::OneOverGamma;
      const GasModel g(gamma, delta, law);
      const double v = g.vacuum();
      const double rho = v * (1.0 + 1e-8) + 5.0 * unit(rng);
      const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [&](double t) { return (t - v) / t * g.pressure_derivative(t); }, v, rho, 12,
          1e-12);
      const double got = g.perturbed_pressure(rho);
      worst = std::max(worst, std::abs(got - ref) / std::abs(ref));
      if (gamma == 1.0) {
        auto F = [&](double r) { return r - v * std::log(r); };
        const double exact = F(rho) - F(v);
        const double scale = std::max(std::abs(F(rho)), std::abs(F(v)));
        worst_exact = std::max(worst_exact, std::abs(got - exact) / scale);
      }
    }
  }
  return {worst <= 1e-9 && worst_exact <= 1e-14,
          "max rel error " + fmt("%.2e", worst) + ", isothermal antiderivative " +
              fmt("%.2e", worst_exact)};
}

Verdict check_riemann() {
  std::vector<std::future<LibraryRun>> jobs;
  std::vector<std::string> names;
  for (const auto& name : scenario_names()) {
    if (make_scenario(name).tag != "existence") continue;
    names.push_back(name);
    auto c = named(name, 100);
    c.set("t_end", "5");
    jobs.push_back(std::async(std::launch::async, [=] {
      return run_scenario(c, {MonitorId::RiemannGrowth}, 1);
    }));
  }
  double slack = 1e300;
  bool ok = true;
  for (auto& j : jobs) {
    const auto r = j.get();
    ok = ok && r.outcome.complete;
    for (const auto& row : r.report.rows) slack = std::min(slack, row.riemann_slack);
  }
  ok = ok && slack >= -1e-6;
  std::string list;
  for (const auto& n : names) list += (list.empty() ? "" : ",") + n;
  return {ok, list + " to T=5, min slack " + fmt("%.4g", slack)};
}

Verdict check_plateau() {
  auto c2 = named("doping_ramp", 100);
  auto c1 = named("doping_ramp", 100);
  c1.set("gamma", "1");
  auto j2 = std::async(std::launch::async, [=] {
    return run_scenario(c2, {MonitorId::UniformBounds}, 10);
  });
  auto j1 = std::async(std::launch::async, [=] {
    return run_scenario(c1, {MonitorId::UniformBounds}, 10);
  });
  const auto r2 = j2.get();
  const auto r1 = j1.get();
  bool ok = true;
  std::string detail;
  for (const auto* r : {&r2, &r1}) {
    const auto& p = r->report.plateau;
    const bool good = r->outcome.complete && p && p->asserted && p->ok;
    ok = ok && good;
    detail += "gamma=" + fmt("%g", r->sc.model.gamma());
    if (p) {
      detail += " growth " + fmt("%.2e", p->growth_first) + "/" +
                fmt("%.2e", p->growth_second);
    }
    detail += "; ";
  }
  return {ok, detail + "T=50"};
}

Verdict check_entropy() {
  const Grid1D grid(0.0, 1.0, 200, Boundary::Periodic);
  const GasModel model(2.0, 0.005);
  SolverConfig cfg;
  cfg.epsilon = 1e-3;
  cfg.t_end = 0.5;
  const auto profile = make_profile(grid, std::vector<double>(grid.n_cells, 1.0),
                                    std::vector<double>(grid.n_cells, 1.0), 0.0);
  std::vector<double> raw(grid.n_cells), u(grid.n_cells);
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    const double x = grid.center(i);
    raw[i] = 1.0 + 0.2 * std::sin(2.0 * M_PI * x);
    u[i] = 0.5 * std::sin(2.0 * M_PI * x);
  }
  Trajectory traj;
  const auto out = run(prepare_initial(raw, u, model, cfg, grid), profile, model, cfg, grid,
                       [&](const HydroState& s, const ElectricField&, long) {
                         traj.states.push_back(s);
                       });
  const auto pair = mechanical_energy_pair(model);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  bool ok = out.complete;
  for (int k = 0; k < 20; ++k) {
    const double hx = 0.05 + 0.2 * unit(rng);
    const double xc = hx + (1.0 - 2.0 * hx) * unit(rng);
    const double ht = 0.05 + 0.15 * unit(rng);
    const double tc = ht + (0.5 - 2.0 * ht) * unit(rng);
    const auto phi = bump_test_function(xc, hx, tc, ht, 0.5 + unit(rng));
    const auto r = entropy_residual(traj, pair, phi, profile, model, grid, cfg);
    const double scale = (grid.dx() + cfg.epsilon) * r.magnitude;
    worst = std::max(worst, -r.value / scale);
    ok = ok && r.value >= -entropy_tolerance(kEntropyC, grid.dx(), cfg.epsilon, r.magnitude);
  }
  return {ok, "20 test functions, max -residual/((dx+eps)|.|) = " + fmt("%.3g", worst) +
                  ", C = " + fmt("%g", kEntropyC)};
}

Verdict check_picard(const fs::path& scratch) {
  const fs::path dir = scratch / "picard";
  fs::create_directories(dir);
  write_text(dir / "run.cfg",
             "scenario = bump\nepsilon = 0.01\npicard_t1 = 0.01\npicard_intervals = 20\n");
  std::ostringstream log, err;
  CommandOptions o;
  o.config = dir / "run.cfg";
  o.out_dir = dir / "out";
  o.log = &log;
  o.err = &err;
  const int rc = cmd_picard(o);
  std::string line = log.str();
  while (!line.empty() && line.back() == '\n') line.pop_back();
  return {rc == kPass, line};
}

Verdict check_relaxation() {
  const auto setup = make_relaxation_setup(RunConfig{});
  const auto r = relaxation_study(setup);
  std::string detail = "e =";
  bool complete = true;
  for (const auto& row : r.rows) {
    detail += " " + fmt("%.4g", row.l1_error);
    complete = complete && row.complete;
  }
  detail += ", dissipation spread " + fmt("%.3f", r.dissipation_spread);
  return {complete && r.monotone && r.dissipation_spread < 2.0, detail};
}

std::vector<double> coarsen(const std::vector<double>& fine) {
  std::vector<double> out(fine.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (fine[2 * i] + fine[2 * i + 1]);
  return out;
}

double l1_gap(const std::vector<double>& coarse, const std::vector<double>& fine, double dx) {
  const auto avg = coarsen(fine);
  double s = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) s += std::abs(coarse[i] - avg[i]) * dx;
  return s;
}

Verdict check_self_convergence() {
  const std::vector<std::size_t> levels{100, 200, 400, 800};
  std::vector<std::future<HydroState>> jobs;
  for (std::size_t n : levels) {
    jobs.push_back(std::async(std::launch::async, [n] {
      auto c = named("bump", n);
      c.set("t_end", "0.1");
      const auto sc = make_scenario(c);
      return run(sc.initial(), sc.profile, sc.model, sc.cfg, sc.grid, nullptr).final_state;
    }));
  }
  std::vector<HydroState> hydro;
  for (auto& j : jobs) hydro.push_back(j.get());
  std::vector<double> gaps;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    const double dx = 1.0 / levels[k];
    gaps.push_back(l1_gap(hydro[k].rho, hydro[k + 1].rho, dx) +
                   l1_gap(hydro[k].mom, hydro[k + 1].mom, dx));
  }
  const double r1 = gaps[0] / gaps[1];
  const double r2 = gaps[1] / gaps[2];

  std::vector<std::vector<double>> dd;
  for (std::size_t n : levels) {
    const Grid1D grid(-4.0, 4.0, n);
    const GasModel model(2.0, 0.0, PressureLaw::Plain);
    const auto profile = make_profile(grid, std::vector<double>(n, 1.0),
                                      std::vector<double>(n, 1.0), 0.0);
    std::vector<double> N(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = grid.center(i);
      N[i] = 1.0 + 0.5 * std::exp(-4.0 * x * x);
    }
    dd.push_back(advance_to(make_drift_diffusion_state(N, profile, model, grid), 0.1,
                            profile, model, grid)
                     .N);
  }
  std::vector<double> dd_gaps;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    dd_gaps.push_back(l1_gap(dd[k], dd[k + 1], 8.0 / levels[k]));
  }
  const double order = std::log2(dd_gaps[1] / dd_gaps[2]);
  return {r1 >= 1.8 && r2 >= 1.8 && order >= 1.0,
          "hydro ratios " + fmt("%.3f", r1) + ", " + fmt("%.3f", r2) +
              "; drift-diffusion order " + fmt("%.3f", order)};
}

std::vector<std::pair<std::string, std::string>> tree(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().filename() == "run_meta.json") continue;
    files.emplace_back(fs::relative(e.path(), root).string(), read_text(e.path()));
  }
  std::sort(files.begin(), files.end());
  return files;
}

Verdict check_determinism(const fs::path& scratch) {
  const fs::path dir = scratch / "determinism";
  fs::create_directories(dir);
  write_text(dir / "run.cfg", "scenario = bump\nmonitor_cadence = 20\n");
  std::ostringstream log, err;
  CommandOptions o;
  o.config = dir / "run.cfg";
  o.log = &log;
  o.err = &err;
  o.out_dir = dir / "a";
  const int ra = cmd_solve(o);
  o.out_dir = dir / "b";
  const int rb = cmd_solve(o);
  const auto a = tree(dir / "a");
  const auto b = tree(dir / "b");
  return {ra == kPass && rb == kPass && a == b && !a.empty(),
          std::to_string(a.size()) + " files compared, exit codes " + std::to_string(ra) +
              "/" + std::to_string(rb)};
}

}  // namespace

int main() {
  const fs::path scratch = fs::temp_directory_path() / "epsim_acceptance";
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Verdict()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failures;
    std::printf("[%s] %2d %-18s %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", id, name,
                v.detail.c_str(), secs);
    std::fflush(stdout);
  };

  std::vector<LibraryRun> runs;
  report(1, "positivity", [&] {
    runs = library_runs();
    return check_positivity(runs);
  });
  report(2, "mass", [&] { return check_mass(runs); });
  report(3, "field-bound", [&] { return check_field(runs); });
  report(4, "perturbed-pressure", check_perturbed_pressure);
  report(5, "riemann-growth", check_riemann);
  report(6, "uniform-bounds", check_plateau);
  report(7, "entropy", check_entropy);
  report(8, "picard", [&] { return check_picard(scratch); });
  report(9, "relaxation-limit", check_relaxation);
  report(10, "self-convergence", check_self_convergence);
  report(11, "determinism", [&] { return check_determinism(scratch); });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

#include "epsim/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "epsim/io.hpp"
#include "epsim/picard.hpp"
#include "epsim/relaxation.hpp"

namespace epsim {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

RunConfig load_config(const CommandOptions& options) {
  if (options.config.empty()) throw ConfigError("--config is required");
  RunConfig config = RunConfig::load(options.config);
  if (options.monitors) config.set("monitors", *options.monitors);
  if (options.seed) config.set("seed", std::to_string(*options.seed));
  // pin table paths so the echoed config works from any directory
  for (const char* key : {"profile_a_file", "profile_b_file"}) {
    if (!config.has(key)) continue;
    fs::path p = config.get_string(key, "");
    if (p.is_relative()) p = fs::absolute(config.base_dir / p).lexically_normal();
    config.set(key, p.string());
  }
  return config;
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create " + dir.string());
}

ordered_json violation_json(const Violation& v) {
  return ordered_json{{"monitor", v.monitor}, {"time", v.time}, {"value", v.value},
                      {"bound", v.bound}};
}

ordered_json scenario_json(const Scenario& sc) {
  return ordered_json{{"name", sc.name},
                      {"tag", sc.tag},
                      {"expects_theorem2", sc.expects_theorem2},
                      {"theorem2_ok", sc.profile.theorem2_ok},
                      {"theorem2_violation", sc.profile.theorem2_violation}};
}

ordered_json monitor_summary(const MonitorSuite& suite, const RunReport& rep,
                             const Scenario& sc) {
  ordered_json out = ordered_json::object();
  auto count = [&](const char* name) {
    return std::count_if(rep.violations.begin(), rep.violations.end(),
                         [&](const Violation& v) { return v.monitor == name; });
  };
  for (MonitorId id : suite.enabled) {
    const char* name = to_string(id);
    ordered_json m{{"violations", count(name)}};
    switch (id) {
      case MonitorId::Mass: {
        double drift = 0.0;
        for (const auto& r : rep.rows) drift = std::max(drift, std::abs(r.mass - rep.initial_mass));
        m["initial"] = rep.initial_mass;
        m["final"] = rep.rows.empty() ? rep.initial_mass : rep.rows.back().mass;
        m["max_abs_drift"] = drift;
        break;
      }
      case MonitorId::Positivity: {
        double lo = HUGE_VAL;
        for (const auto& r : rep.rows) lo = std::min(lo, r.min_rho);
        m["min_rho"] = lo;
        m["floor"] = sc.model.vacuum() - suite.tol.positivity_rel * sc.model.delta();
        break;
      }
      case MonitorId::FieldBound: {
        double ratio = 0.0, sup = 0.0;
        for (const auto& r : rep.rows) {
          ratio = std::max(ratio, r.field_ratio);
          sup = std::max(sup, r.sup_abs_e);
        }
        m["bound"] = rep.field_bound;
        m["max_sup_abs_e"] = sup;
        m["max_ratio"] = ratio;
        m["margin"] = rep.field_bound - sup;
        break;
      }
      case MonitorId::RiemannGrowth: {
        double slack = HUGE_VAL;
        for (const auto& r : rep.rows) slack = std::min(slack, r.riemann_slack);
        m["m1"] = rep.field_bound;
        m["m2"] = rep.riemann_m2;
        m["min_slack"] = slack;
        break;
      }
      case MonitorId::UniformBounds: {
        if (rep.plateau) {
          const auto& p = *rep.plateau;
          m["asserted"] = p.asserted;
          m["ok"] = p.ok;
          m["early_first"] = p.early_first;
          m["late_first"] = p.late_first;
          m["early_second"] = p.early_second;
          m["late_second"] = p.late_second;
          m["growth_first"] = p.growth_first;
          m["growth_second"] = p.growth_second;
        }
        break;
      }
    }
    out[name] = m;
  }
  return out;
}

std::vector<fs::path> list_snapshots(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".dat") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string snapshot_name(long index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06ld.dat", index);
  return buf;
}

struct PicardCheck {
  PicardResult result;
  double distance = 0.0;
  double tolerance = 0.0;
  double hydro_max_dt = 0.0;
  double max_ratio = 0.0;
  bool pass = false;
  ordered_json report;
};

PicardCheck picard_check(const RunConfig& config) {
  Scenario sc = make_scenario(config);
  PicardSlab slab;
  slab.t1 = config.get_double("picard_t1", slab.t1);
  slab.intervals = static_cast<int>(config.get_long("picard_intervals", slab.intervals));
  const double tol = config.get_double("picard_tol", 1e-12);
  const int max_iter = static_cast<int>(config.get_long("picard_max_iter", 60));

  const HydroState initial = sc.initial();
  const HeatKernel kernel(sc.cfg.epsilon);
  PicardCheck check;
  check.result = picard_solve(initial, sc.profile, sc.model, kernel, sc.cfg, sc.grid,
                              slab, tol, max_iter);

  SolverConfig hcfg = sc.cfg;
  hcfg.t_end = initial.time + slab.t1;
  const RunOutcome hydro =
      run(initial, sc.profile, sc.model, hcfg, sc.grid,
          [](const HydroState&, const ElectricField&, long) {});
  check.hydro_max_dt = hydro.max_dt;

  double dr = 0.0, dm = 0.0;
  for (std::size_t i = 0; i < sc.grid.n_cells; ++i) {
    dr = std::max(dr, std::abs(hydro.final_state.rho[i] - check.result.endpoint.rho[i]));
    dm = std::max(dm, std::abs(hydro.final_state.mom[i] - check.result.endpoint.mom[i]));
  }
  check.distance = dr + dm;
  check.tolerance = 5.0 * (sc.grid.dx() + hydro.max_dt);
  int contracting = 0;
  bool all_below = true;
  for (const auto& h : check.result.history) {
    if (h.n < 2) continue;
    check.max_ratio = std::max(check.max_ratio, h.ratio);
    if (h.ratio < 1.0) ++contracting; else all_below = false;
  }
  check.pass = check.result.converged && all_below && contracting >= 5 &&
               hydro.complete && check.distance <= check.tolerance;

  check.report = ordered_json{
      {"scenario", scenario_json(sc)},
      {"t1", slab.t1},
      {"intervals", slab.intervals},
      {"epsilon", sc.cfg.epsilon},
      {"tolerance_iteration", tol},
      {"iterations", check.result.history.size()},
      {"converged", check.result.converged},
      {"diverged", check.result.diverged},
      {"message", check.result.message},
      {"max_ratio", check.max_ratio},
      {"contracting_iterates", contracting},
      {"fixed_point_residual", check.result.fixed_point_residual},
      {"band_ok", check.result.final_iterate.band_ok},
      {"hydro_max_dt", hydro.max_dt},
      {"endpoint_sup_distance", check.distance},
      {"endpoint_tolerance", check.tolerance},
      {"pass", check.pass}};
  return check;
}

template <class F>
int guarded(const CommandOptions& options, const char* name, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    *options.err << name << ": configuration error: " << e.what() << "\n";
  } catch (const IoError& e) {
    *options.err << name << ": i/o error: " << e.what() << "\n";
  } catch (const fs::filesystem_error& e) {
    *options.err << name << ": i/o error: " << e.what() << "\n";
  } catch (const DomainError& e) {
    *options.err << name << ": invalid input: " << e.what() << "\n";
  } catch (const ShapeError& e) {
    *options.err << name << ": invalid input: " << e.what() << "\n";
  }
  return kUsageError;
}

}  // namespace

MonitorSuite make_suite(const RunConfig& config) {
  MonitorSuite suite;
  const std::string list = config.get_string("monitors", "all");
  if (list != "all") {
    suite.enabled.clear();
    for (const auto& name : split_list(list)) {
      const MonitorId id = parse_monitor(name);
      if (!suite.has(id)) suite.enabled.push_back(id);
    }
    if (suite.enabled.empty()) throw ConfigError("monitors: empty selection");
  }
  suite.cadence = config.get_long("monitor_cadence", suite.cadence);
  suite.tol.mass_rel = config.get_double("mass_tol", suite.tol.mass_rel);
  suite.tol.positivity_rel = config.get_double("positivity_tol", suite.tol.positivity_rel);
  suite.tol.field = config.get_double("field_tol", suite.tol.field);
  suite.tol.riemann = config.get_double("riemann_tol", suite.tol.riemann);
  suite.tol.plateau = config.get_double("plateau_tol", suite.tol.plateau);
  suite.validate();
  return suite;
}

int cmd_solve(const CommandOptions& options) {
  return guarded(options, "solve", [&] {
    const auto wall_start = std::chrono::steady_clock::now();
    const RunConfig config = load_config(options);
    const Scenario sc = make_scenario(config);
    const MonitorSuite suite = make_suite(config);

    const fs::path out = options.out_dir;
    const fs::path snaps = out / "snapshots";
    prepare_dir(out);
    fs::remove_all(snaps);
    prepare_dir(snaps);
    write_text(out / "config.txt", config.echo());

    MonitorRecorder recorder(suite, sc.profile, sc.model, sc.grid);
    long index = 0;
    auto observer = [&](const HydroState& st, const ElectricField& field, long step) {
      write_text(snaps / snapshot_name(index++),
                 snapshot_text(st, field, sc.model, sc.grid, step, sc.name));
      recorder.observe(st, field, step);
    };
    const RunOutcome outcome =
        run(sc.initial(), sc.profile, sc.model, sc.cfg, sc.grid, observer, suite.cadence);
    recorder.finish(outcome.complete ? sc.cfg.t_end : outcome.final_state.time);

    RunReport rep = recorder.report();
    if (!outcome.complete) {
      rep.violations.push_back({"solver", outcome.failure_time, outcome.min_rho,
                                sc.model.vacuum()});
    }
    const ElectricField final_field =
        solve_field(outcome.final_state, sc.profile, sc.model, sc.grid);
    write_text(out / "final.dat", snapshot_text(outcome.final_state, final_field,
                                                sc.model, sc.grid, outcome.steps,
                                                sc.name));
    write_text(out / "monitors.csv", monitor_csv(recorder.report()));

    ordered_json violations = ordered_json::array();
    for (const auto& v : rep.violations) violations.push_back(violation_json(v));
    write_text(out / "violations.json", violations.dump(2) + "\n");

    ordered_json config_echo = ordered_json::object();
    for (const auto& [k, v] : config.entries()) config_echo[k] = v;
    ordered_json enabled = ordered_json::array();
    for (MonitorId id : suite.enabled) enabled.push_back(to_string(id));

    const bool pass = rep.violations.empty();
    ordered_json report{
        {"config", config_echo},
        {"scenario", scenario_json(sc)},
        {"model", {{"gamma", sc.model.gamma()},
                   {"delta", sc.model.delta()},
                   {"pressure_law", to_string(sc.model.law())}}},
        {"grid", {{"x_min", sc.grid.x_min},
                  {"x_max", sc.grid.x_max},
                  {"n_cells", sc.grid.n_cells},
                  {"dx", sc.grid.dx()},
                  {"boundary", to_string(sc.grid.boundary)}}},
        {"solver", {{"epsilon", sc.cfg.epsilon},
                    {"tau", sc.cfg.tau},
                    {"cfl", sc.cfg.cfl},
                    {"t_end", sc.cfg.t_end},
                    {"source_variant", to_string(sc.cfg.source_variant)},
                    {"flux_scheme", to_string(sc.cfg.flux_scheme)}}},
        {"run", {{"complete", outcome.complete},
                 {"failure", outcome.failure},
                 {"steps", outcome.steps},
                 {"t_final", outcome.final_state.time},
                 {"min_rho_all_steps", outcome.min_rho},
                 {"min_dt", outcome.min_dt},
                 {"max_dt", outcome.max_dt}}},
        {"monitors_enabled", enabled},
        {"monitor_cadence", suite.cadence},
        {"monitors", monitor_summary(suite, rep, sc)},
        {"time_series", "monitors.csv"},
        {"snapshots", {{"directory", "snapshots"},
                       {"count", index},
                       {"final", "final.dat"}}},
        {"violations", violations},
        {"pass", pass}};
    if (config.has("seed")) report["seed"] = config.get_long("seed", 0);
    write_text(out / "report.json", report.dump(2) + "\n");

    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - wall_start).count();
    write_text(out / "run_meta.json",
               ordered_json{{"wall_clock_seconds", wall}}.dump(2) + "\n");

    *options.log << "solve: " << sc.name << " steps=" << outcome.steps
                 << " violations=" << rep.violations.size()
                 << (pass ? " PASS" : " FAIL") << "\n";
    return pass ? kPass : kAssertionFailure;
  });
}

int cmd_relax(const CommandOptions& options) {
  return guarded(options, "relax", [&] {
    const auto wall_start = std::chrono::steady_clock::now();
    const RunConfig config = load_config(options);
    const RelaxationSetup setup = make_relaxation_setup(config);
    const fs::path out = options.out_dir;
    prepare_dir(out);

    const StudyResult result = relaxation_study(setup);
    write_text(out / "convergence.csv", convergence_csv(result.rows));

    ordered_json rows = ordered_json::array();
    for (const auto& r : result.rows) {
      rows.push_back({{"tau", r.tau},
                      {"epsilon", r.epsilon},
                      {"delta", r.delta},
                      {"L1_error", r.l1_error},
                      {"dissipation_integral", r.dissipation},
                      {"steps", r.steps},
                      {"complete", r.complete},
                      {"failure", r.failure}});
    }
    ordered_json config_echo = ordered_json::object();
    for (const auto& [k, v] : config.entries()) config_echo[k] = v;
    ordered_json manifest{
        {"config", config_echo},
        {"scenario", setup.scenario},
        {"model", {{"gamma", setup.gamma}, {"pressure_law", to_string(setup.law)}}},
        {"grid", {{"x_min", setup.x_min},
                  {"x_max", setup.x_max},
                  {"n_cells", setup.n_cells},
                  {"boundary", to_string(setup.boundary)},
                  {"reference_refinement", setup.reference_refinement}}},
        {"coupling", {{"epsilon", "eps_coeff * sqrt(P'(2 delta)) * tau^eps_power"},
                      {"eps_coeff", setup.coupling.eps_coeff},
                      {"eps_power", setup.coupling.eps_power},
                      {"sound_speed_factor", setup.coupling.sound_speed_factor},
                      {"delta", "delta_coeff * tau^delta_power"},
                      {"delta_coeff", setup.coupling.delta_coeff},
                      {"delta_power", setup.coupling.delta_power}}},
        {"tau_list", setup.tau_list},
        {"horizon", setup.horizon},
        {"initial_layer", setup.layer_fraction * setup.horizon},
        {"samples", setup.samples},
        {"window", {setup.window_lo, setup.window_hi}},
        {"e_minus", setup.e_minus},
        {"cfl", setup.cfl},
        {"flux_scheme", to_string(setup.flux_scheme)},
        {"rows", rows},
        {"monotone", result.monotone},
        {"dissipation_spread", result.dissipation_spread},
        {"message", result.message}};
    write_text(out / "study_manifest.json", manifest.dump(2) + "\n");

    if (!result.monotone) {
      const fs::path raw = out / "raw";
      prepare_dir(raw);
      const Grid1D grid = setup.grid();
      for (std::size_t k = 0; k < result.rows.size(); ++k) {
        const auto& sc = result.scaled[k];
        if (sc.s.empty()) continue;
        std::string text = "# tau = " + format_double(result.rows[k].tau) +
                           "\n# columns = x N_minus_2delta N_dd\n";
        for (std::size_t j = 0; j < sc.s.size(); ++j) {
          text += "# s = " + format_double(sc.s[j]) + "\n";
          for (std::size_t i = 0; i < grid.n_cells; ++i) {
            text += format_double(grid.center(i)) + " " +
                    format_double(sc.N[j][i] - 2.0 * sc.delta) + " " +
                    format_double(result.reference[j][i]) + "\n";
          }
        }
        write_text(raw / ("tau_" + std::to_string(k) + ".dat"), text);
      }
    }
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - wall_start).count();
    write_text(out / "run_meta.json",
               ordered_json{{"wall_clock_seconds", wall}}.dump(2) + "\n");

    for (const auto& r : result.rows) {
      *options.log << "relax: tau=" << format_double(r.tau)
                   << " L1=" << format_double(r.l1_error)
                   << " dissipation=" << format_double(r.dissipation) << "\n";
    }
    *options.log << "relax: " << (result.monotone ? "PASS" : "FAIL ") << result.message << "\n";
    return result.monotone ? kPass : kAssertionFailure;
  });
}

int cmd_verify(const CommandOptions& options) {
  return guarded(options, "verify", [&] {
    const fs::path dir = options.out_dir;
    const fs::path config_path = dir / "config.txt";
    if (!fs::exists(config_path)) throw IoError("missing " + config_path.string());
    RunConfig config = RunConfig::load(config_path);
    const Scenario sc = make_scenario(config);
    const MonitorSuite suite = make_suite(config);

    const auto files = list_snapshots(dir / "snapshots");
    if (files.empty()) throw IoError("no snapshots under " + (dir / "snapshots").string());
    const std::string expected = read_text(dir / "monitors.csv");

    MonitorRecorder recorder(suite, sc.profile, sc.model, sc.grid);
    for (const auto& f : files) {
      const Snapshot snap = read_snapshot(f);
      if (snap.state.size() != sc.grid.n_cells) {
        throw IoError(f.string() + ": cell count differs from the config");
      }
      recorder.observe(snap.state, snap.step);
    }
    const std::string actual = monitor_csv(recorder.report());

    ordered_json report{{"snapshots", files.size()}, {"identical", actual == expected}};
    bool pass = actual == expected;
    if (!pass) {
      std::istringstream a(actual), e(expected);
      std::string la, le;
      long line = 0;
      while (true) {
        ++line;
        const bool ga = static_cast<bool>(std::getline(a, la));
        const bool ge = static_cast<bool>(std::getline(e, le));
        if (!ga && !ge) break;
        if (!ga || !ge || la != le) {
          report["first_mismatch_line"] = line;
          report["expected"] = ge ? le : "<eof>";
          report["actual"] = ga ? la : "<eof>";
          break;
        }
      }
    }
    if (options.picard) {
      PicardCheck check = picard_check(config);
      report["picard"] = check.report;
      write_text(dir / "contraction.csv", contraction_csv(check.result.history));
      pass = pass && check.pass;
    }
    report["pass"] = pass;
    write_text(dir / "verify_report.json", report.dump(2) + "\n");
    *options.log << "verify: " << files.size() << " snapshots, monitors "
                 << (actual == expected ? "identical" : "MISMATCH")
                 << (pass ? " PASS" : " FAIL") << "\n";
    return pass ? kPass : kAssertionFailure;
  });
}

int cmd_picard(const CommandOptions& options) {
  return guarded(options, "picard", [&] {
    const RunConfig config = load_config(options);
    const fs::path out = options.out_dir;
    prepare_dir(out);
    PicardCheck check = picard_check(config);
    write_text(out / "contraction.csv", contraction_csv(check.result.history));
    write_text(out / "picard_report.json", check.report.dump(2) + "\n");
    *options.log << "picard: iterations=" << check.result.history.size()
                 << " max_ratio=" << format_double(check.max_ratio)
                 << " distance=" << format_double(check.distance)
                 << " tolerance=" << format_double(check.tolerance)
                 << (check.pass ? " PASS" : " FAIL") << "\n";
    return check.pass ? kPass : kAssertionFailure;
  });
}

}  // namespace epsim

#include "epsim/scenario.hpp"

#include <cmath>
#include <functional>
#include <optional>

namespace epsim {

namespace {

struct Defaults {
  std::string tag = "existence";
  bool expects_theorem2 = false;
  double gamma = 2.0;
  PressureLaw law = PressureLaw::OneOverGamma;
  Boundary boundary = Boundary::Outflow;
  double t_end = 1.0;
  double tau = 1.0;
  SourceVariant variant = SourceVariant::Original16;
  double background = 0.0;
  double amplitude = 1.0;
  double center = 0.5;
  double width = 0.08;
  double doping = 0.0;
  bool ramp = false;        ///< b rises linearly across the domain
  bool remark_damping = false;  ///< a = E_- - a1 int b
  double e_minus = 0.0;
};

Defaults defaults_for(const std::string& name) {
  Defaults d;
  if (name == "constant") {
    d.boundary = Boundary::Periodic;
    d.background = 0.5;
    d.amplitude = 0.0;
    d.doping = 0.5;
  } else if (name == "bump") {
  } else if (name == "doping_ramp") {
    d.tag = "uniform_bounds";
    d.expects_theorem2 = true;
    d.law = PressureLaw::Plain;
    d.t_end = 50.0;
    d.amplitude = 0.5;
    d.width = 0.06;
    d.doping = 0.5;
    d.ramp = true;
    d.remark_damping = true;
    d.e_minus = 1.0;
  } else if (name == "isothermal_bump") {
    d.gamma = 1.0;
  } else if (name == "equilibrium") {
    d.tag = "relaxation";
    d.background = 1.0;
    d.amplitude = 0.0;
    d.doping = 1.0;
    d.tau = 0.1;
    d.variant = SourceVariant::Relaxation41;
  } else {
    throw ConfigError("unknown scenario '" + name + "'");
  }
  return d;
}

std::optional<ProfileTable> table(const RunConfig& config, const std::string& key) {
  if (!config.has(key)) return std::nullopt;
  std::filesystem::path p = config.get_string(key, "");
  if (p.is_relative()) p = config.base_dir / p;
  return ProfileTable::load(p);
}

std::function<double(double)> bump_function(double background, double amplitude,
                                            double center, double width) {
  if (!(width > 0.0)) throw ConfigError("width must be > 0");
  return [=](double x) {
    const double z = (x - center) / width;
    return background + amplitude * std::exp(-0.5 * z * z);
  };
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"constant", "bump", "doping_ramp",
                                              "isothermal_bump", "equilibrium"};
  return names;
}

HydroState Scenario::initial() const {
  return prepare_initial(raw_rho, raw_u, model, cfg, grid);
}

Scenario make_scenario(const std::string& name) {
  RunConfig config;
  config.set("scenario", name);
  return make_scenario(config);
}

Scenario make_scenario(const RunConfig& config) {
  Scenario sc;
  sc.name = config.get_string("scenario", "bump");
  const Defaults d = defaults_for(sc.name);
  sc.tag = d.tag;
  sc.expects_theorem2 = d.expects_theorem2;

  sc.model = GasModel(config.get_double("gamma", d.gamma),
                      config.get_double("delta", 0.01),
                      config.has("pressure_law")
                          ? parse_pressure_law(config.get_string("pressure_law", ""))
                          : d.law);
  const long n = config.get_long("n_cells", 100);
  if (n < 8) throw ConfigError("n_cells must be >= 8");
  sc.grid = Grid1D(config.get_double("x_min", 0.0), config.get_double("x_max", 1.0),
                   static_cast<std::size_t>(n),
                   config.has("boundary")
                       ? parse_boundary(config.get_string("boundary", ""))
                       : d.boundary);

  SolverConfig& cfg = sc.cfg;
  cfg.epsilon = config.get_double("epsilon", 0.01);
  cfg.tau = config.get_double("tau", d.tau);
  cfg.cfl = config.get_double("cfl", 0.5);
  cfg.t_end = config.get_double("t_end", d.t_end);
  cfg.source_variant = config.has("source_variant")
                           ? parse_source_variant(config.get_string("source_variant", ""))
                           : d.variant;
  cfg.flux_scheme = parse_flux_scheme(config.get_string("flux_scheme", "llf"));
  cfg.smoothing_width = config.get_double("smoothing_width", 0.0);
  cfg.validate();

  const auto rho_fn = bump_function(config.get_double("background", d.background),
                                    config.get_double("amplitude", d.amplitude),
                                    config.get_double("center", d.center),
                                    config.get_double("width", d.width));
  const double velocity = config.get_double("velocity", 0.0);
  const double doping = config.get_double("doping", d.doping);
  const double e_minus = config.get_double("e_minus", d.e_minus);
  const double x_lo = sc.grid.x_min;
  const double span = sc.grid.x_max - sc.grid.x_min;

  const auto a_table = table(config, "profile_a_file");
  const auto b_table = table(config, "profile_b_file");

  const std::size_t cells = sc.grid.n_cells;
  std::vector<double> a(cells), b(cells);
  sc.raw_rho.resize(cells);
  sc.raw_u.assign(cells, velocity);
  for (std::size_t i = 0; i < cells; ++i) {
    const double x = sc.grid.center(i);
    sc.raw_rho[i] = rho_fn(x);
    if (b_table) {
      b[i] = (*b_table)(x);
    } else {
      b[i] = d.ramp ? doping * (x - x_lo) / span : doping;
    }
  }
  if (a_table) {
    for (std::size_t i = 0; i < cells; ++i) a[i] = (*a_table)(sc.grid.center(i));
  } else if (d.remark_damping) {
    const double a1 = config.get_double("a1", 1.0);
    const auto cum = cumulative_integral(b, sc.grid.dx());
    for (std::size_t i = 0; i < cells; ++i) a[i] = e_minus - a1 * cum[i];
  } else {
    a.assign(cells, config.get_double("a_value", 1.0));
  }
  sc.profile = make_profile(sc.grid, std::move(a), std::move(b), e_minus);
  return sc;
}

RelaxationSetup make_relaxation_setup(const RunConfig& config) {
  RelaxationSetup s;
  s.scenario = config.get_string("scenario", "bump");
  double amplitude = 0.5;
  if (s.scenario == "equilibrium") {
    amplitude = 0.0;
  } else if (s.scenario != "bump") {
    throw ConfigError("relax supports scenario bump or equilibrium, not '" +
                      s.scenario + "'");
  }
  s.gamma = config.get_double("gamma", 2.0);
  s.law = parse_pressure_law(config.get_string("pressure_law", "plain"));
  s.x_min = config.get_double("x_min", -4.0);
  s.x_max = config.get_double("x_max", 4.0);
  const long n = config.get_long("n_cells", 1600);
  if (n < 8) throw ConfigError("n_cells must be >= 8");
  s.n_cells = static_cast<std::size_t>(n);
  s.boundary = parse_boundary(config.get_string("boundary", "outflow"));

  const double background = config.get_double("background", 1.0);
  s.excess0 = bump_function(background, config.get_double("amplitude", amplitude),
                            config.get_double("center", 0.0),
                            config.get_double("width", 0.35355339059327373));
  const double velocity = config.get_double("velocity", 0.0);
  s.u0 = [velocity](double) { return velocity; };
  const double doping = config.get_double("doping", background);
  s.b = [doping](double) { return doping; };
  const double a_value = config.get_double("a_value", 1.0);
  s.a = [a_value](double) { return a_value; };
  if (auto t = table(config, "profile_a_file")) s.a = *t;
  if (auto t = table(config, "profile_b_file")) s.b = *t;
  s.e_minus = config.get_double("e_minus", 0.0);

  s.tau_list = config.get_list("tau_list", s.tau_list);
  s.coupling.eps_coeff = config.get_double("eps_coeff", s.coupling.eps_coeff);
  s.coupling.eps_power = config.get_double("eps_power", s.coupling.eps_power);
  s.coupling.sound_speed_factor =
      config.get_bool("sound_speed_factor", s.coupling.sound_speed_factor);
  s.coupling.delta_coeff = config.get_double("delta_coeff", s.coupling.delta_coeff);
  s.coupling.delta_power = config.get_double("delta_power", s.coupling.delta_power);
  s.horizon = config.get_double("horizon", s.horizon);
  s.layer_fraction = config.get_double("layer_fraction", s.layer_fraction);
  s.samples = static_cast<int>(config.get_long("samples", s.samples));
  s.window_lo = config.get_double("window_lo", s.window_lo);
  s.window_hi = config.get_double("window_hi", s.window_hi);
  s.cfl = config.get_double("cfl", s.cfl);
  s.flux_scheme = parse_flux_scheme(config.get_string("flux_scheme", "llf"));
  const long refine = config.get_long("reference_refinement", 1);
  if (refine < 1) throw ConfigError("reference_refinement must be >= 1");
  s.reference_refinement = static_cast<std::size_t>(refine);
  s.dd_cfl = config.get_double("dd_cfl", s.dd_cfl);
  s.validate();
  return s;
}

}  // namespace epsim

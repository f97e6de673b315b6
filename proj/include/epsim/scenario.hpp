#pragma once

#include <string>
#include <vector>

#include "epsim/config.hpp"
#include "epsim/hydro.hpp"
#include "epsim/model.hpp"
#include "epsim/relaxation.hpp"

namespace epsim {

/// A fully resolved run: model, grid, solver settings, device and raw data.
struct Scenario {
  std::string name;
  std::string tag;  ///< hypothesis set the fixture targets
  bool expects_theorem2 = false;
  GasModel model{2.0, 0.01};
  Grid1D grid{0.0, 1.0, 100};
  SolverConfig cfg;
  DeviceProfile profile;
  std::vector<double> raw_rho;  ///< density above the offset vacuum
  std::vector<double> raw_u;

  HydroState initial() const;
};

/// constant, bump, doping_ramp, isothermal_bump, equilibrium.
const std::vector<std::string>& scenario_names();

/// Builds the scenario named by `scenario`, with config keys overriding the
/// scenario's defaults.
Scenario make_scenario(const RunConfig& config);

/// Convenience: the named scenario with its defaults.
Scenario make_scenario(const std::string& name);

/// Study setup for `relax`: scenario `bump` (default) or `equilibrium`.
RelaxationSetup make_relaxation_setup(const RunConfig& config);

}  // namespace epsim

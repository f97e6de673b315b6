#pragma once

#include <vector>

#include "epsim/model.hpp"

namespace epsim {

/// Recorded hydro states, ordered by time, with the field of each state
/// when the recorder had it.
struct Trajectory {
  std::vector<HydroState> states;
  std::vector<std::vector<double>> fields;
};

/// Diffusively scaled trajectory: N(x,s) = rho(x, s/tau),
/// J(x,s) = m(x, s/tau)/tau, Upsilon(x,s) = E(x, s/tau).
struct ScaledTrajectory {
  std::vector<double> s;
  std::vector<std::vector<double>> N;
  std::vector<std::vector<double>> J;
  std::vector<std::vector<double>> Upsilon;
  double tau = 1.0;
  double delta = 0.0;
};

}  // namespace epsim

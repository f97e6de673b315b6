#pragma once

#include <vector>

#include "epsim/model.hpp"

namespace epsim {

/// Electric field anchored at the left edge of the truncated domain.
struct ElectricField {
  std::vector<double> e_vals;
  double e_minus = 0.0;
  double sup_bound = 0.0;  ///< |E_-| + int (rho0 - 2 delta) + int |b|
};

/// E(x) = E_- + int_{x_min}^x ((rho - 2 delta) - b) dx.
///
/// The running sum takes full cells to the left and half of the current one,
/// so (E[i+1] - E[i])/dx is the average of the two cell sources.
ElectricField solve_field(const HydroState& state, const DeviceProfile& profile,
                          const GasModel& model, const Grid1D& grid);

/// Uniform-in-time bound on |E| implied by non-increasing excess mass.
double field_bound(const HydroState& initial, const DeviceProfile& profile,
                   const GasModel& model, const Grid1D& grid);

/// Same bound from its three ingredients.
double field_bound(double e_minus, double excess_mass, double abs_doping_mass);

}  // namespace epsim

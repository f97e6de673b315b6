#include "epsim/field.hpp"

#include <cmath>

namespace epsim {

ElectricField solve_field(const HydroState& state, const DeviceProfile& profile,
                          const GasModel& model, const Grid1D& grid) {
  const std::size_t n = grid.n_cells;
  if (state.size() != n || profile.b_vals.size() != n) {
    throw ShapeError("solve_field: arrays do not conform to grid");
  }
  const double dx = grid.dx();
  const double vac = model.vacuum();

  ElectricField field;
  field.e_minus = profile.e_minus;
  field.e_vals.resize(n);
  double running = profile.e_minus;
  double mass = 0.0;
  double doping = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double source = (state.rho[i] - vac) - profile.b_vals[i];
    field.e_vals[i] = running + 0.5 * source * dx;
    running += source * dx;
    mass += (state.rho[i] - vac) * dx;
    doping += std::abs(profile.b_vals[i]) * dx;
  }
  field.sup_bound = field_bound(profile.e_minus, mass, doping);
  return field;
}

double field_bound(double e_minus, double excess_mass, double abs_doping_mass) {
  return std::abs(e_minus) + excess_mass + abs_doping_mass;
}

double field_bound(const HydroState& initial, const DeviceProfile& profile,
                   const GasModel& model, const Grid1D& grid) {
  const double dx = grid.dx();
  double mass = 0.0;
  double doping = 0.0;
  for (std::size_t i = 0; i < initial.size(); ++i) {
    mass += (initial.rho[i] - model.vacuum()) * dx;
    doping += std::abs(profile.b_vals[i]) * dx;
  }
  return field_bound(profile.e_minus, mass, doping);
}

}  // namespace epsim

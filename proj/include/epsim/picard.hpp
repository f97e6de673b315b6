#pragma once

#include <string>
#include <vector>

#include "epsim/hydro.hpp"
#include "epsim/model.hpp"

namespace epsim {

/// Heat kernel of u_t = eps u_xx: G(x,t) = exp(-x^2/(4 eps t)) / sqrt(4 pi eps t).
class HeatKernel {
 public:
  explicit HeatKernel(double epsilon);

  double epsilon() const { return epsilon_; }
  double value(double x, double t) const;
  /// d/dx of value(x, t).
  double derivative(double x, double t) const;
  /// Standard deviation sqrt(2 eps t).
  double spread(double t) const;

  /// Sum of point samples G(k dx, t) dx for |k dx| <= 8 spread.
  double sampled_mass(double dx, double t) const;

  /// Exact cell integrals int_{(k-1/2)dx}^{(k+1/2)dx} G(y, t) dy for
  /// k = -reach .. reach, truncated at 8 spreads. Stays normalised when the
  /// kernel is narrower than a cell.
  std::vector<double> cell_weights(double dx, double t) const;

 private:
  double epsilon_;
};

/// Iterate on the space-time slab: values at nodes t_j = j t1/K.
struct PicardIterate {
  std::vector<double> times;
  std::vector<std::vector<double>> rho;
  std::vector<std::vector<double>> mom;
  int index = 0;
  bool band_ok = true;   ///< delta <= rho <= 2M, |m| <= 2M on the slab
  std::string band_violation;
};

struct PicardSlab {
  double t1 = 0.01;
  int intervals = 20;
};

/// n = 0: the initial data held constant in time.
PicardIterate initial_iterate(const HydroState& initial, const PicardSlab& slab);

/// Band size M: max of sup rho0, sup |m0| and the excess mass.
double picard_band(const HydroState& initial, const GasModel& model,
                   const Grid1D& grid);

/// One sweep of the integral equations: heat-smoothed initial data plus
/// Duhamel integrals of the flux derivative and of the momentum source,
/// midpoint rule in time and exact cell integrals of the kernel in space.
/// The flux term is integrated by parts, (f G_y) -> -(f_y G), so no kernel
/// derivative is sampled near s = t.
PicardIterate picard_step(const PicardIterate& prev, const HydroState& initial,
                          const DeviceProfile& profile, const GasModel& model,
                          const HeatKernel& kernel, const SolverConfig& cfg,
                          const Grid1D& grid);

/// sup over the slab of |rho_a - rho_b|_inf + |m_a - m_b|_inf.
double slab_distance(const PicardIterate& a, const PicardIterate& b);

struct ContractionRecord {
  int n = 0;
  double sup_distance = 0.0;
  double ratio = 0.0;  ///< d_n / d_{n-1}; 0 for the first entry
};

struct PicardResult {
  HydroState endpoint;
  PicardIterate final_iterate;
  std::vector<ContractionRecord> history;
  bool converged = false;
  bool diverged = false;
  std::string message;
  double fixed_point_residual = 0.0;
};

/// Iterates until the sup distance drops below `tol` or `max_iterations`.
/// Three consecutive ratios >= 1 end the solve with a divergence report.
PicardResult picard_solve(const HydroState& initial,
                          const DeviceProfile& profile, const GasModel& model,
                          const HeatKernel& kernel, const SolverConfig& cfg,
                          const Grid1D& grid, const PicardSlab& slab,
                          double tol, int max_iterations = 50);

}  // namespace epsim

#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "epsim/hydro.hpp"
#include "epsim/model.hpp"
#include "epsim/trajectory.hpp"

namespace epsim {

/// N(x,s) = rho(x, s/tau), J = m/tau, Upsilon = E, sampled at each requested s
/// by the nearest recorded t. Needs `trajectory.fields` filled.
ScaledTrajectory rescale(const Trajectory& trajectory, double tau, double delta,
                         std::span<const double> s_instants);

// ---------------------------------------------------------------------------
// Drift-diffusion limit
// ---------------------------------------------------------------------------

struct DriftDiffusionState {
  std::vector<double> N;
  std::vector<double> Upsilon;  ///< cell centres
  std::vector<double> J;        ///< cell centres, averaged from the faces
  double s = 0.0;
};

class DriftDiffusionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fills Upsilon (source N - b, E_- anchored) and J for the given N.
DriftDiffusionState make_drift_diffusion_state(std::vector<double> N,
                                               const DeviceProfile& profile,
                                               const GasModel& model,
                                               const Grid1D& grid);

/// dt_s = cfl / (2 max P'(N) / (a_min dx^2) + max|Upsilon| / (a_min dx)).
double drift_diffusion_time_step(const DriftDiffusionState& state,
                                 const DeviceProfile& profile,
                                 const GasModel& model, const Grid1D& grid,
                                 double cfl);

/// Explicit conservative step of N_s + J_x = 0, J = (N Upsilon - P(N)_x)/a.
/// Face drift is centred while the cell Peclet number stays <= 1 and upwind
/// beyond. Throws DriftDiffusionFailure if N goes negative.
DriftDiffusionState drift_diffusion_step(const DriftDiffusionState& state,
                                         const DeviceProfile& profile,
                                         const GasModel& model,
                                         const Grid1D& grid, double dt_s);

/// Steps to `s_target`, halving dt up to `max_halvings` times after a
/// positivity failure before giving up.
DriftDiffusionState advance_to(DriftDiffusionState state, double s_target,
                               const DeviceProfile& profile,
                               const GasModel& model, const Grid1D& grid,
                               double cfl = 0.45, int max_halvings = 8);

// ---------------------------------------------------------------------------
// Convergence study
// ---------------------------------------------------------------------------

/// epsilon = eps_coeff * sqrt(P'(2 delta)) * tau^eps_power,
/// delta = delta_coeff * tau^delta_power. Without the sound-speed factor
/// epsilon = eps_coeff * tau^eps_power.
struct Coupling {
  double eps_coeff = 0.1;
  double eps_power = 2.0;
  bool sound_speed_factor = true;
  double delta_coeff = 1.0;
  double delta_power = 1.0;

  double delta(double tau) const;
  double epsilon(double tau, const GasModel& model) const;
};

using ProfileFunction = std::function<double(double)>;

struct RelaxationSetup {
  std::string scenario = "bump";
  double gamma = 2.0;
  PressureLaw law = PressureLaw::Plain;
  double x_min = -4.0;
  double x_max = 4.0;
  std::size_t n_cells = 1600;
  Boundary boundary = Boundary::Outflow;
  ProfileFunction a;            ///< damping coefficient a(x)
  ProfileFunction b;            ///< doping b(x)
  double e_minus = 0.0;
  ProfileFunction excess0;      ///< N0(x), the hydro data being 2 delta + N0
  ProfileFunction u0;           ///< initial velocity
  std::vector<double> tau_list{0.2, 0.1, 0.05};
  Coupling coupling;
  double horizon = 1.0;         ///< L in scaled time
  double layer_fraction = 0.05; ///< s0 = layer_fraction * L
  int samples = 41;             ///< s-instants on [0, L]
  double window_lo = -1e300;    ///< comparison window [x0, x1]
  double window_hi = 1e300;
  double cfl = 0.5;
  FluxScheme flux_scheme = FluxScheme::LocalLaxFriedrichs;
  std::size_t reference_refinement = 1;
  double dd_cfl = 0.45;

  void validate() const;
  Grid1D grid() const;
};

struct StudyRow {
  double tau = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double l1_error = 0.0;
  double dissipation = 0.0;
  long steps = 0;
  bool complete = true;
  std::string failure;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  bool monotone = false;
  double dissipation_spread = 0.0;  ///< max / min over the rows
  std::vector<double> s_instants;
  std::vector<std::vector<double>> reference;  ///< N_dd on the study grid
  std::vector<ScaledTrajectory> scaled;        ///< one per tau
  std::string message;
};

/// Reference N_dd at the requested s-instants, computed on the grid refined by
/// `setup.reference_refinement` and averaged back onto the study grid.
std::vector<std::vector<double>> drift_diffusion_reference(
    const RelaxationSetup& setup, std::span<const double> s_instants);

/// L1 distance over [x0, x1] x [s0, L] between N - 2 delta and N_dd,
/// trapezoid in s over the instants with s >= s0.
double relaxation_error(const ScaledTrajectory& scaled,
                        const std::vector<std::vector<double>>& reference,
                        const Grid1D& grid, double s0, double x0, double x1);

/// Runs each tau concurrently to t = L/tau with the relaxation source,
/// rescales and compares against the drift-diffusion reference.
StudyResult relaxation_study(const RelaxationSetup& setup);

}  // namespace epsim

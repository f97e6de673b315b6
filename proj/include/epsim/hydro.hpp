#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "epsim/field.hpp"
#include "epsim/model.hpp"

namespace epsim {

/// Which momentum source the regularised system carries.
enum class SourceVariant {
  Original16,    ///< rho E - a rho u / tau
  Relaxation41,  ///< (rho - 2 delta) E - a (rho - 2 delta) u / tau
};

enum class FluxScheme {
  LocalLaxFriedrichs,  ///< dissipation speed from the two states at a face
  Rusanov,             ///< one dissipation speed, the step's global maximum
};

const char* to_string(SourceVariant v);
const char* to_string(FluxScheme f);
SourceVariant parse_source_variant(const std::string& text);
FluxScheme parse_flux_scheme(const std::string& text);

struct SolverConfig {
  double epsilon = 1e-2;
  double tau = 1.0;
  double cfl = 0.5;
  double t_end = 1.0;
  SourceVariant source_variant = SourceVariant::Original16;
  FluxScheme flux_scheme = FluxScheme::LocalLaxFriedrichs;
  double smoothing_width = 0.0;

  void validate() const;
};

struct StepReport {
  double dt_used = 0.0;
  double max_wave_speed = 0.0;
  double post_step_min_rho = 0.0;
  int source_solve_iterations = 0;
};

/// Raised when a step produces NaN/Inf or breaks the density floor. Carries
/// the last state that passed validation.
class IntegrationFailure : public std::runtime_error {
 public:
  enum class Kind { NonFinite, Positivity };

  IntegrationFailure(Kind kind, const std::string& what, HydroState last_valid)
      : std::runtime_error(what), kind_(kind), last_valid_(std::move(last_valid)) {}

  Kind kind() const { return kind_; }
  const HydroState& last_valid() const { return last_valid_; }

 private:
  Kind kind_;
  HydroState last_valid_;
};

/// Shifts raw data onto the offset vacuum, (raw_rho + 2 delta, raw_u), and
/// mollifies it with a normalised discrete Gaussian of standard deviation
/// `cfg.smoothing_width`. Width zero returns the shifted data unchanged.
HydroState prepare_initial(std::span<const double> raw_rho,
                           std::span<const double> raw_u,
                           const GasModel& model, const SolverConfig& cfg,
                           const Grid1D& grid);

struct FluxPair {
  double mass;
  double momentum;
};

/// ((rho - 2 delta) u, rho u^2 - delta u^2 + P1(rho)).
FluxPair flux(const GasModel& model, double rho, double mom);

/// Largest |lambda| over the grid.
double max_wave_speed(const HydroState& state, const GasModel& model);

/// dt = cfl / (s/dx + 2 eps/dx^2); never larger than
/// cfl * min(dx/s, dx^2/(2 eps)).
double stable_time_step(double max_speed, const SolverConfig& cfg,
                        const Grid1D& grid);

/// One step of the IMEX scheme: explicit flux divergence, viscosity and field
/// force; the linear damping is integrated exactly with the explicit forcing
/// frozen over the step. `dt_cap` truncates dt (e.g. to land on t_end).
std::pair<HydroState, StepReport> step(const HydroState& state,
                                       const DeviceProfile& profile,
                                       const GasModel& model,
                                       const SolverConfig& cfg,
                                       const Grid1D& grid,
                                       double dt_cap = 1e300);

/// Variant of `step` with a prescribed dt (no CFL selection). Used by tests
/// and by callers that need a common time grid.
std::pair<HydroState, StepReport> step_with_dt(const HydroState& state,
                                               const DeviceProfile& profile,
                                               const GasModel& model,
                                               const SolverConfig& cfg,
                                               const Grid1D& grid, double dt);

/// Called with the current state, its field and the number of steps taken.
using StateObserver = std::function<void(const HydroState&,
                                         const ElectricField&, long step)>;

struct RunOutcome {
  HydroState final_state;
  bool complete = true;
  double failure_time = 0.0;
  std::string failure;
  long steps = 0;
  double min_rho = 0.0;       ///< over every step, not only observed ones
  double max_dt = 0.0;
  double min_dt = 0.0;
};

/// Advances to cfg.t_end. The observer sees the initial state, every
/// `cadence`-th step, and the final state. With `stop_times` given, steps are
/// shortened so the run lands exactly on each listed time and the observer
/// is called there as well.
RunOutcome run(const HydroState& initial, const DeviceProfile& profile,
               const GasModel& model, const SolverConfig& cfg,
               const Grid1D& grid, const StateObserver& observer,
               long cadence = 1, std::span<const double> stop_times = {});

}  // namespace epsim

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "epsim/field.hpp"
#include "epsim/hydro.hpp"
#include "epsim/model.hpp"
#include "epsim/trajectory.hpp"

namespace epsim {

// ---------------------------------------------------------------------------
// Suite configuration
// ---------------------------------------------------------------------------

enum class MonitorId { Mass, Positivity, FieldBound, RiemannGrowth, UniformBounds };

const char* to_string(MonitorId id);
MonitorId parse_monitor(const std::string& text);
std::vector<MonitorId> all_monitors();

struct MonitorTolerances {
  double mass_rel = 1e-12;      ///< per 1000 steps for periodic runs
  double positivity_rel = 1e-12;
  double field = 1e-9;
  double riemann = 1e-6;
  double plateau = 0.01;
};

struct MonitorSuite {
  std::vector<MonitorId> enabled = all_monitors();
  MonitorTolerances tol;
  long cadence = 10;

  bool has(MonitorId id) const;
  void validate() const;
};

// ---------------------------------------------------------------------------
// Pointwise monitors
// ---------------------------------------------------------------------------

/// Excess mass sum (rho - 2 delta) dx.
double monitor_mass(const HydroState& state, const GasModel& model,
                    const Grid1D& grid);

/// max |E| / field.sup_bound.
double monitor_field_bound(const ElectricField& field);

/// max over x of max(z, w).
double max_riemann_invariant(const HydroState& state, const GasModel& model);

/// Min slack of max(z, w) <= M2 + M1 t over the grid.
double monitor_riemann_growth(const HydroState& state, double field_bound_m1,
                              double initial_bound_m2, const GasModel& model);

/// One time-uniformity sample: (sup rho, sup |u|) for gamma > 1 and
/// (sup(ln rho - u), sup(ln rho + u)) for gamma == 1.
struct UniformBoundSample {
  double time = 0.0;
  double first = 0.0;
  double second = 0.0;
};

UniformBoundSample monitor_uniform_bounds(const HydroState& state,
                                          const GasModel& model);

struct PlateauResult {
  bool asserted = false;  ///< false when the profile misses the hypotheses
  bool ok = true;
  double growth_first = 0.0;   ///< relative excess of late over early max
  double growth_second = 0.0;
  double early_first = 0.0, late_first = 0.0;
  double early_second = 0.0, late_second = 0.0;
};

/// Compares the maxima over [T/2, T] with those over [0, T/2].
PlateauResult plateau_statistic(const std::vector<UniformBoundSample>& history,
                                double t_end, double tol, bool theorem2_ok);

// ---------------------------------------------------------------------------
// Entropy pairs and residuals
// ---------------------------------------------------------------------------

struct EntropyPair {
  std::string name;
  std::function<double(double, double)> eta;
  std::function<double(double, double)> q;
  std::function<double(double, double)> eta_m;
  bool convex = false;
};

/// eta* = m^2/(2 rho) + rho int_{2 delta}^rho P(s)/s^2 ds and its flux.
EntropyPair mechanical_energy_pair(const GasModel& model);

/// Smallest eigenvalue of a centred finite-difference Hessian of eta.
double min_hessian_eigenvalue(const EntropyPair& pair, double rho, double mom);

struct TestFunction {
  std::function<double(double, double)> value;  ///< phi(x, t)
  std::function<double(double, double)> d_t;
  std::function<double(double, double)> d_x;
};

/// amplitude * psi((x - xc)/hx) * psi((t - tc)/ht) with the C^inf bump
/// psi(s) = exp(-1/(1 - s^2)) on |s| < 1.
TestFunction bump_test_function(double xc, double hx, double tc, double ht,
                                double amplitude);

struct EntropyResidual {
  double value = 0.0;
  double magnitude = 0.0;  ///< same quadrature over absolute integrands
};

/// Discrete int int eta phi_t + q phi_x + S eta_m phi dx dt with S the
/// momentum source of `cfg.source_variant`; trapezoid in time, cell sums in
/// space. Throws ConfigError on a non-convex pair when `require_convex`.
EntropyResidual entropy_residual(const Trajectory& trajectory,
                                 const EntropyPair& pair,
                                 const TestFunction& phi,
                                 const DeviceProfile& profile,
                                 const GasModel& model, const Grid1D& grid,
                                 const SolverConfig& cfg,
                                 bool require_convex = true);

/// C (dx + eps) scaled by the residual's magnitude.
double entropy_tolerance(double c, double dx, double epsilon, double magnitude);

/// int_0^L int (N - 2 delta) U^2 dx ds with U = J/N, trapezoid in s.
double dissipation_integral(const ScaledTrajectory& trajectory,
                            const Grid1D& grid);

// ---------------------------------------------------------------------------
// Run-time recording
// ---------------------------------------------------------------------------

struct MonitorRow {
  long step = 0;
  double time = 0.0;
  double mass = 0.0;
  double min_rho = 0.0;
  double sup_rho = 0.0;
  double sup_abs_u = 0.0;
  double sup_abs_e = 0.0;
  double field_ratio = 0.0;
  double max_z = 0.0;
  double max_w = 0.0;
  double riemann_slack = 0.0;
};

struct Violation {
  std::string monitor;
  double time = 0.0;
  double value = 0.0;
  double bound = 0.0;
};

/// Monitor time series of one run.
struct RunReport {
  std::vector<MonitorRow> rows;
  std::vector<Violation> violations;
  std::vector<UniformBoundSample> uniform_history;
  std::optional<PlateauResult> plateau;
  double initial_mass = 0.0;
  double field_bound = 0.0;
  double riemann_m2 = 0.0;
};

/// Evaluates the enabled monitors on each observed state. Every value is a
/// function of the observed states alone, so replaying saved snapshots
/// reproduces the report.
class MonitorRecorder {
 public:
  MonitorRecorder(MonitorSuite suite, const DeviceProfile& profile,
                  const GasModel& model, const Grid1D& grid);

  void observe(const HydroState& state, const ElectricField& field, long step);
  void observe(const HydroState& state, long step);

  /// Closes the run: evaluates the plateau statistic over [0, t_end].
  void finish(double t_end);

  const RunReport& report() const { return report_; }

 private:
  void flag(const char* monitor, double time, double value, double bound);

  MonitorSuite suite_;
  const DeviceProfile& profile_;
  GasModel model_;
  Grid1D grid_;
  RunReport report_;
  bool started_ = false;
  double previous_mass_ = 0.0;
};

}  // namespace epsim

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "epsim/errors.hpp"

namespace epsim {

// ---------------------------------------------------------------------------
// Gas model
// ---------------------------------------------------------------------------

/// Normalisation of the polytropic pressure law.
enum class PressureLaw {
  OneOverGamma,  ///< P(rho) = rho^gamma / gamma
  Plain,         ///< P(rho) = rho^gamma
};

/// Polytropic gas with a vacuum offset.
///
/// The offset `delta` shifts the vacuum state to rho = 2 delta; the momentum
/// flux then uses the perturbed pressure
///
///     P1(rho) = int_{2 delta}^{rho} (t - 2 delta)/t * P'(t) dt,
///
/// which is nonsingular at the shifted vacuum. `delta == 0` describes the
/// unperturbed limit model and is accepted wherever the formulas stay finite.
class GasModel {
 public:
  GasModel(double gamma, double delta,
           PressureLaw law = PressureLaw::OneOverGamma);

  double gamma() const { return gamma_; }
  double delta() const { return delta_; }
  double vacuum() const { return 2.0 * delta_; }
  PressureLaw law() const { return law_; }
  double theta() const { return 0.5 * (gamma_ - 1.0); }
  bool isothermal() const { return gamma_ == 1.0; }

  /// A copy of this model with a different offset.
  GasModel with_delta(double delta) const { return {gamma_, delta, law_}; }

  double pressure(double rho) const;
  double pressure_derivative(double rho) const;
  double pressure_second_derivative(double rho) const;

  /// P1(rho, delta); requires rho >= 2 delta.
  double perturbed_pressure(double rho) const;

  /// int_{2 delta}^{rho} P(s)/s^2 ds, the specific internal energy of the
  /// mechanical-energy entropy.
  double energy_integral(double rho) const;

  /// Lower limit l of the Riemann potential: 2 delta for gamma >= 3,
  /// 0 for 1 < gamma < 3, and 1 for gamma == 1 (so the potential is ln rho).
  double riemann_lower_limit() const;

  /// int_l^rho sqrt(P'(s))/s ds.
  double riemann_potential(double rho) const;

 private:
  double coefficient() const;  // P'(rho) = coefficient * rho^(gamma-1)

  double gamma_;
  double delta_;
  PressureLaw law_;
};

const char* to_string(PressureLaw law);
PressureLaw parse_pressure_law(const std::string& text);

/// int_a^b s^q ds for 0 <= a <= b, stable as q -> -1.
double power_integral(double q, double a, double b);

double pressure(const GasModel& model, double rho);
double perturbed_pressure(const GasModel& model, double rho);

struct WaveSpeeds {
  double lambda1;
  double lambda2;
};

/// Characteristic speeds of the offset system at (rho, m).
WaveSpeeds eigenvalues(const GasModel& model, double rho, double mom);

struct RiemannPair {
  double z;
  double w;
};

/// z = phi(rho) - u, w = phi(rho) + u with phi the Riemann potential.
RiemannPair riemann_invariants(const GasModel& model, double rho, double mom);

/// As above, but checks that `lower_ref` is the limit the model prescribes.
RiemannPair riemann_invariants(const GasModel& model, double rho, double mom,
                               double lower_ref);

// ---------------------------------------------------------------------------
// Grid and state
// ---------------------------------------------------------------------------

enum class Boundary { Outflow, Periodic };

const char* to_string(Boundary b);
Boundary parse_boundary(const std::string& text);

/// Uniform cell-centred grid on [x_min, x_max].
struct Grid1D {
  double x_min = 0.0;
  double x_max = 1.0;
  std::size_t n_cells = 8;
  Boundary boundary = Boundary::Outflow;

  Grid1D() = default;
  Grid1D(double lo, double hi, std::size_t n, Boundary bc = Boundary::Outflow);

  double dx() const { return (x_max - x_min) / static_cast<double>(n_cells); }
  double center(std::size_t i) const {
    return x_min + (static_cast<double>(i) + 0.5) * dx();
  }
  std::vector<double> centers() const;
  Grid1D refined(std::size_t factor) const;
};

struct HydroState {
  std::vector<double> rho;
  std::vector<double> mom;
  double time = 0.0;

  std::size_t size() const { return rho.size(); }
  double velocity(std::size_t i) const { return mom[i] / rho[i]; }
};

/// Throws DomainError if rho dips below 2 delta - 1e-12 delta or any entry
/// is not finite; ShapeError on size mismatch with the grid.
void validate_state(const HydroState& state, const GasModel& model,
                    const Grid1D& grid);

/// Constant state (2 delta, 0).
HydroState vacuum_state(const GasModel& model, const Grid1D& grid);

// ---------------------------------------------------------------------------
// Device profile
// ---------------------------------------------------------------------------

struct Theorem2Check {
  bool ok = false;
  std::string violation;  // first failing condition, empty when ok
};

/// Damping a(x), doping b(x), left field datum E_-, and the derived
/// C(x) = (E_- - int_{-inf}^x b) / a(x).
struct DeviceProfile {
  std::vector<double> a_vals;
  std::vector<double> b_vals;
  double e_minus = 0.0;
  std::vector<double> c_vals;
  bool theorem2_ok = false;
  std::string theorem2_violation;
};

/// Builds C(x) and runs the hypothesis check.
DeviceProfile make_profile(const Grid1D& grid, std::vector<double> a,
                           std::vector<double> b, double e_minus);

/// Conditions on (a, b, C): b >= 0 and int b < E_- (both waived when b <= 0
/// everywhere), 0 < a0 <= a, a' <= tol, C' >= -tol, and C inside the bracket
/// (E_- - int b)/max a <= C <= E_-/a0.
Theorem2Check validate_theorem2(const DeviceProfile& profile,
                                const Grid1D& grid);

/// Running integral from the left edge to each cell centre: full cells to
/// the left plus half of the current cell.
std::vector<double> cumulative_integral(std::span<const double> values,
                                        double dx);

/// Centered differences with one-sided stencils at the ends.
std::vector<double> derivative(std::span<const double> values, double dx);

// ---------------------------------------------------------------------------
// Auxiliary fields for the time-uniform estimates
// ---------------------------------------------------------------------------

struct AuxFields {
  std::vector<double> A;
  std::vector<double> B;
  std::vector<double> cumulative_charge;
};

/// A = Q/a + C and B = -(a'/a^2) Q with Q = int_{-inf}^x (rho - 2 delta).
AuxFields build_aux_fields(const HydroState& state,
                           const DeviceProfile& profile, const GasModel& model,
                           const Grid1D& grid);

}  // namespace epsim

#include "epsim/picard.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>

#include "epsim/field.hpp"

namespace epsim {

HeatKernel::HeatKernel(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("heat kernel: epsilon must be > 0");
}

double HeatKernel::value(double x, double t) const {
  const double four_et = 4.0 * epsilon_ * t;
  return std::exp(-x * x / four_et) / std::sqrt(std::numbers::pi * four_et);
}

double HeatKernel::derivative(double x, double t) const {
  return -x / (2.0 * epsilon_ * t) * value(x, t);
}

double HeatKernel::spread(double t) const { return std::sqrt(2.0 * epsilon_ * t); }

double HeatKernel::sampled_mass(double dx, double t) const {
  const long reach = static_cast<long>(std::ceil(8.0 * spread(t) / dx));
  double sum = 0.0;
  for (long k = -reach; k <= reach; ++k) sum += value(static_cast<double>(k) * dx, t);
  return sum * dx;
}

std::vector<double> HeatKernel::cell_weights(double dx, double t) const {
  const long reach =
      std::max(1L, static_cast<long>(std::ceil(8.0 * spread(t) / dx)));
  const double scale = 1.0 / std::sqrt(4.0 * epsilon_ * t);
  std::vector<double> w(2 * reach + 1);
  for (long k = -reach; k <= reach; ++k) {
    const double lo = (static_cast<double>(k) - 0.5) * dx * scale;
    const double hi = (static_cast<double>(k) + 0.5) * dx * scale;
    // erfc differences keep the far tails accurate
    w[k + reach] = lo >= 0.0 ? 0.5 * (std::erfc(lo) - std::erfc(hi))
                             : 0.5 * (std::erfc(-hi) - std::erfc(-lo));
  }
  return w;
}

// ---------------------------------------------------------------------------

namespace {

class Convolver {
 public:
  explicit Convolver(const Grid1D& grid)
      : n_(static_cast<long>(grid.n_cells)),
        periodic_(grid.boundary == Boundary::Periodic) {}

  // out += scale * (weights * v), v extended by its boundary values
  void add(std::span<const double> v, const std::vector<double>& weights,
           double scale, std::vector<double>& out) const {
    const long reach = static_cast<long>(weights.size() / 2);
    for (long i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (long k = -reach; k <= reach; ++k) {
        acc += weights[k + reach] * v[index(i - k)];
      }
      out[i] += scale * acc;
    }
  }

  long index(long j) const {
    if (periodic_) return ((j % n_) + n_) % n_;
    return std::clamp(j, 0L, n_ - 1);
  }

 private:
  long n_;
  bool periodic_;
};

}  // namespace

PicardIterate initial_iterate(const HydroState& initial, const PicardSlab& slab) {
  if (!(slab.t1 > 0.0) || slab.intervals < 1) {
    throw ConfigError("picard slab: need t1 > 0 and at least one interval");
  }
  PicardIterate it;
  const int K = slab.intervals;
  it.times.resize(K + 1);
  for (int j = 0; j <= K; ++j) it.times[j] = initial.time + slab.t1 * j / K;
  it.rho.assign(K + 1, initial.rho);
  it.mom.assign(K + 1, initial.mom);
  it.index = 0;
  return it;
}

double picard_band(const HydroState& initial, const GasModel& model,
                   const Grid1D& grid) {
  double m = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < initial.size(); ++i) {
    m = std::max({m, initial.rho[i], std::abs(initial.mom[i])});
    mass += (initial.rho[i] - model.vacuum()) * grid.dx();
  }
  return std::max(m, mass);
}

PicardIterate picard_step(const PicardIterate& prev, const HydroState& initial,
                          const DeviceProfile& profile, const GasModel& model,
                          const HeatKernel& kernel, const SolverConfig& cfg,
                          const Grid1D& grid) {
  const std::size_t n = grid.n_cells;
  const int K = static_cast<int>(prev.times.size()) - 1;
  const double dx = grid.dx();
  const double h = (prev.times.back() - prev.times.front()) / K;
  const Convolver conv(grid);

  // Duhamel integrands at the interval midpoints.
  std::vector<std::vector<double>> mass_term(K), mom_term(K);
  for (int k = 0; k < K; ++k) {
    HydroState mid;
    mid.rho.resize(n);
    mid.mom.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      mid.rho[i] = 0.5 * (prev.rho[k][i] + prev.rho[k + 1][i]);
      mid.mom[i] = 0.5 * (prev.mom[k][i] + prev.mom[k + 1][i]);
    }
    const ElectricField field = solve_field(mid, profile, model, grid);
    std::vector<FluxPair> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = flux(model, mid.rho[i], mid.mom[i]);

    mass_term[k].resize(n);
    mom_term[k].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto l = static_cast<std::size_t>(conv.index(static_cast<long>(i) - 1));
      const auto r = static_cast<std::size_t>(conv.index(static_cast<long>(i) + 1));
      const double span = (r == i || l == i) ? dx : 2.0 * dx;
      const double rho = mid.rho[i];
      const double carrier =
          cfg.source_variant == SourceVariant::Original16 ? rho : rho - model.vacuum();
      const double source = carrier * field.e_vals[i] -
                            profile.a_vals[i] * carrier * (mid.mom[i] / rho) / cfg.tau;
      mass_term[k][i] = -(f[r].mass - f[l].mass) / span;
      mom_term[k][i] = -(f[r].momentum - f[l].momentum) / span + source;
    }
  }

  // Kernel weights by lag: node j against midpoint k uses t_j - s_k.
  std::vector<std::vector<double>> lag_weights(K);
  for (int lag = 0; lag < K; ++lag) {
    lag_weights[lag] = kernel.cell_weights(dx, (lag + 0.5) * h);
  }

  PicardIterate next;
  next.times = prev.times;
  next.index = prev.index + 1;
  next.rho.assign(K + 1, std::vector<double>(n, 0.0));
  next.mom.assign(K + 1, std::vector<double>(n, 0.0));
  next.rho[0] = initial.rho;
  next.mom[0] = initial.mom;

  const double vac = model.vacuum();
  std::vector<double> excess0(n);
  for (std::size_t i = 0; i < n; ++i) excess0[i] = initial.rho[i] - vac;

  for (int j = 1; j <= K; ++j) {
    auto& rho = next.rho[j];
    auto& mom = next.mom[j];
    const auto w0 = kernel.cell_weights(dx, j * h);
    conv.add(excess0, w0, 1.0, rho);
    for (double& v : rho) v += vac;
    conv.add(initial.mom, w0, 1.0, mom);
    for (int k = 0; k < j; ++k) {
      const auto& w = lag_weights[j - k - 1];
      conv.add(mass_term[k], w, h, rho);
      conv.add(mom_term[k], w, h, mom);
    }
  }

  const double band = picard_band(initial, model, grid);
  for (int j = 0; j <= K && next.band_ok; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double r = next.rho[j][i];
      const double m = next.mom[j][i];
      if (!std::isfinite(r) || !std::isfinite(m)) {
        next.band_ok = false;
        next.band_violation = "non-finite iterate";
        break;
      }
      if (r < model.delta() || r > 2.0 * band || std::abs(m) > 2.0 * band) {
        next.band_ok = false;
        next.band_violation = "iterate left delta <= rho <= 2M, |m| <= 2M";
        break;
      }
    }
  }
  return next;
}

double slab_distance(const PicardIterate& a, const PicardIterate& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.rho.size(); ++j) {
    double dr = 0.0, dm = 0.0;
    for (std::size_t i = 0; i < a.rho[j].size(); ++i) {
      dr = std::max(dr, std::abs(a.rho[j][i] - b.rho[j][i]));
      dm = std::max(dm, std::abs(a.mom[j][i] - b.mom[j][i]));
    }
    if (!std::isfinite(dr) || !std::isfinite(dm)) return HUGE_VAL;
    d = std::max(d, dr + dm);
  }
  return d;
}

PicardResult picard_solve(const HydroState& initial,
                          const DeviceProfile& profile, const GasModel& model,
                          const HeatKernel& kernel, const SolverConfig& cfg,
                          const Grid1D& grid, const PicardSlab& slab,
                          double tol, int max_iterations) {
  validate_state(initial, model, grid);
  PicardResult result;
  PicardIterate current = initial_iterate(initial, slab);
  int rising = 0;
  double last = 0.0;

  for (int n = 1; n <= max_iterations; ++n) {
    PicardIterate next;
    try {
      next = picard_step(current, initial, profile, model, kernel, cfg, grid);
    } catch (const DomainError& e) {
      result.diverged = true;
      result.message = std::string("iterate left the state domain: ") + e.what();
      break;
    }
    const double d = slab_distance(next, current);
    ContractionRecord rec{n, d, n > 1 && last > 0.0 ? d / last : 0.0};
    result.history.push_back(rec);
    current = std::move(next);

    if (!std::isfinite(d)) {
      result.diverged = true;
      result.message = "quadrature overflow";
      break;
    }
    if (d < tol) {
      result.converged = true;
      break;
    }
    rising = (n > 1 && rec.ratio >= 1.0) ? rising + 1 : 0;
    if (rising >= 3) {
      result.diverged = true;
      result.message = "no contraction over three iterates; try t1 = " +
                       std::to_string(0.5 * slab.t1);
      break;
    }
    last = d;
  }
  if (!result.converged && !result.diverged) {
    result.message = "iteration limit reached";
  }

  result.final_iterate = current;
  result.endpoint.rho = current.rho.back();
  result.endpoint.mom = current.mom.back();
  result.endpoint.time = current.times.back();
  if (result.converged) {
    auto check = picard_step(current, initial, profile, model, kernel, cfg, grid);
    result.fixed_point_residual = slab_distance(check, current);
  }
  return result;
}

}  // namespace epsim

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "epsim/field.hpp"
#include "epsim/model.hpp"
#include "epsim/monitors.hpp"
#include "epsim/picard.hpp"
#include "epsim/relaxation.hpp"

namespace epsim {

/// 17 significant digits, so text round-trips to the same double.
std::string format_double(double v);

/// Columnar snapshot (x rho u m E z w) behind '#' header lines.
std::string snapshot_text(const HydroState& state, const ElectricField& field,
                          const GasModel& model, const Grid1D& grid, long step,
                          const std::string& scenario);

struct Snapshot {
  long step = 0;
  HydroState state;
};

Snapshot parse_snapshot(const std::string& text, const std::string& origin);
Snapshot read_snapshot(const std::filesystem::path& path);

/// step,time,mass,min_rho,... one row per observation.
std::string monitor_csv(const RunReport& report);

/// n,sup_distance,ratio.
std::string contraction_csv(const std::vector<ContractionRecord>& history);

/// tau,epsilon,delta,L1_error,dissipation_integral.
std::string convergence_csv(const std::vector<StudyRow>& rows);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace epsim

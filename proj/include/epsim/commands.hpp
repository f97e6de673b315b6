#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "epsim/config.hpp"
#include "epsim/monitors.hpp"
#include "epsim/scenario.hpp"

namespace epsim {

enum ExitCode : int { kPass = 0, kAssertionFailure = 1, kUsageError = 2 };

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir = "out";
  std::optional<std::string> monitors;  ///< comma list, overrides the config
  std::optional<unsigned long> seed;
  bool picard = false;                  ///< verify: also run the Picard check
  std::ostream* log = &std::cout;
  std::ostream* err = &std::cerr;
};

/// Monitor selection, cadence and tolerances from the config keys.
MonitorSuite make_suite(const RunConfig& config);

/// Hydro run with monitors. Writes config.txt, snapshots/, monitors.csv,
/// violations.json, report.json, final.dat and run_meta.json.
int cmd_solve(const CommandOptions& options);

/// Relaxation study. Writes convergence.csv and study_manifest.json, plus
/// raw/ fields when the errors fail to decrease.
int cmd_relax(const CommandOptions& options);

/// Replays the monitors over a solve directory's snapshots and compares the
/// result with its monitors.csv byte for byte.
int cmd_verify(const CommandOptions& options);

/// Picard iteration on [0, t1] against the hydro solver. Writes
/// contraction.csv and picard_report.json.
int cmd_picard(const CommandOptions& options);

}  // namespace epsim

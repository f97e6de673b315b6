#include <CLI11.hpp>

#include "epsim/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"epsim: Euler-Poisson flux-viscosity solver and estimate checks"};
  app.require_subcommand(1);

  epsim::CommandOptions opt;
  std::string monitors;
  unsigned long seed = 0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opt.config, "run configuration (key = value)");
    if (needs_config) c->required();
    sub->add_option("--out-dir", opt.out_dir, "output directory")->capture_default_str();
    sub->add_option("--monitors", monitors, "comma list of monitors, or 'all'");
    sub->add_option("--seed", seed, "seed recorded with the run");
  };

  auto* solve = app.add_subcommand("solve", "hydro run with monitors");
  add_common(solve, true);
  auto* relax = app.add_subcommand("relax", "relaxation-limit study");
  add_common(relax, true);
  auto* verify = app.add_subcommand("verify", "replay monitors over a solve directory");
  add_common(verify, false);
  verify->add_flag("--picard", opt.picard, "also cross-check the Picard iteration");
  auto* picard = app.add_subcommand("picard", "Picard iteration against the hydro solver");
  add_common(picard, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : epsim::kUsageError;
  }
  if (!monitors.empty()) opt.monitors = monitors;
  for (auto* sub : {solve, relax, verify, picard}) {
    if (sub->count("--seed") > 0) opt.seed = seed;
  }

  if (*solve) return epsim::cmd_solve(opt);
  if (*relax) return epsim::cmd_relax(opt);
  if (*verify) return epsim::cmd_verify(opt);
  return epsim::cmd_picard(opt);
}

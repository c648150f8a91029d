#include <string>

#include <CLI11.hpp>

#include "fluorospec/commands.hpp"
#include "fluorospec/version.hpp"

namespace {

void add_common(CLI::App* cmd, fluorospec::cli::CommandOptions& opts) {
  cmd->add_option("--config", opts.config_path, "key = value configuration file");
  cmd->add_option("--preset", opts.preset_name, "figure preset (see --list-presets)");
  cmd->add_option("--out", opts.out_path, "output file path");
  cmd->add_option("--format", opts.format, "csv | json-lines")->default_str("csv");
  cmd->add_option("--seed", opts.seed, "override the RNG seed")
      ->each([&opts](const std::string&) { opts.has_seed = true; });
  cmd->add_option("--threads", opts.threads, "worker threads (0 = auto; never affects results)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fluorospec: homodyne spectra of driven two-level fluorescence under Markovian feedback"};
  app.set_version_flag("--version", fluorospec::kVersion);
  app.require_subcommand(1);

  fluorospec::cli::CommandOptions opts;
  bool list_presets = false;
  app.add_flag("--list-presets", list_presets, "print preset names and exit");

  CLI::App* spectrum = app.add_subcommand("spectrum", "analytic inelastic spectrum on the mu grid");
  add_common(spectrum, opts);

  CLI::App* simulate = app.add_subcommand("simulate", "sample trajectories and export the ensemble");
  add_common(simulate, opts);
  simulate->add_flag("--reference", opts.reference_measure,
                     "integrate the linear equation under the reference measure (records weights)");
  simulate->add_flag("--record-states", opts.record_states, "export Bloch coordinates too");

  CLI::App* mc = app.add_subcommand("mc-spectrum", "Monte Carlo spectrum from simulated currents");
  add_common(mc, opts);
  mc->add_flag("--compare-analytic", opts.compare_analytic, "print mu, mc, analytic, z table");

  CLI::App* autoc = app.add_subcommand("autocorr", "stationary current autocovariance");
  add_common(autoc, opts);
  autoc->add_option("--lag-max", opts.lag_max, "largest lag (default 10)");
  autoc->add_option("--lag-count", opts.lag_count, "number of lags (default 51)");
  autoc->add_flag("--empirical", opts.empirical, "add Monte Carlo estimates");

  CLI::App* optimize = app.add_subcommand("optimize", "tune control parameters");
  add_common(optimize, opts);
  optimize->add_option("--free", opts.free_specs, "free parameter, name=lo:hi (repeatable)");
  optimize->add_option("--objective", opts.objective_spec,
                       "value-at-mu:MU | min-over-window:LO:HI:N | fwhm");
  optimize->add_option("--budget", opts.budget, "objective evaluations per restart (>= 50)");
  optimize->add_option("--restarts", opts.restarts, "multistart count (default 8)");
  optimize->add_option("--grid", opts.grid_specs,
                       "exhaustive scan instead, name=lo:hi:count (repeatable, max 2)");
  optimize->add_flag("--allow-alpha", opts.allow_alpha,
                     "permit alpha1_sq/alpha2_sq as free parameters");

  CLI::App* validate = app.add_subcommand("validate", "run the fast invariant suite");
  validate->add_option("--seed", opts.seed, "random-draw seed")
      ->each([&opts](const std::string&) { opts.has_seed = true; });
  validate->add_flag("--corrupt-a-matrix", opts.corrupt_a_matrix)->group("");  // test hook

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : fluorospec::cli::kExitUsage;
  }

  if (list_presets) {
    for (const auto& name : fluorospec::cli::preset_names()) std::printf("%s\n", name.c_str());
    return 0;
  }

  if (spectrum->parsed()) return fluorospec::cli::cmd_spectrum(opts);
  if (simulate->parsed()) return fluorospec::cli::cmd_simulate(opts);
  if (mc->parsed()) return fluorospec::cli::cmd_mc_spectrum(opts);
  if (autoc->parsed()) return fluorospec::cli::cmd_autocorr(opts);
  if (optimize->parsed()) return fluorospec::cli::cmd_optimize(opts);
  if (validate->parsed()) return fluorospec::cli::cmd_validate(opts);
  return fluorospec::cli::kExitUsage;
}

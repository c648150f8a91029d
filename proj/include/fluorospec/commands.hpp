#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fluorospec/config.hpp"

namespace fluorospec::cli {

// Exit codes shared by all commands:
//   0 success, 1 usage/parse/validation, 2 numerical failure,
//   3 optimization budget exhausted (best-so-far still written).
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitBudget = 3;

struct CommandOptions {
  std::string config_path;
  std::string preset_name;
  std::string out_path;
  std::string format = "csv";
  bool compare_analytic = false;
  bool has_seed = false;
  std::uint64_t seed = 0;
  int threads = 0;

  // simulate
  bool reference_measure = false;
  bool record_states = false;

  // autocorr
  double lag_max = 10.0;
  int lag_count = 51;
  bool empirical = false;

  // optimize
  std::vector<std::string> free_specs;  ///< name=lo:hi
  std::string objective_spec = "value-at-mu:0";
  int budget = 400;
  int restarts = 8;
  std::vector<std::string> grid_specs;  ///< name=lo:hi:count (grid-scan mode)
  bool allow_alpha = false;

  // validate (test hook)
  bool corrupt_a_matrix = false;
};

int cmd_spectrum(const CommandOptions& opts);
int cmd_simulate(const CommandOptions& opts);
int cmd_mc_spectrum(const CommandOptions& opts);
int cmd_autocorr(const CommandOptions& opts);
int cmd_optimize(const CommandOptions& opts);
int cmd_validate(const CommandOptions& opts);

/// Builds the run configuration from preset and/or config file plus overrides;
/// throws ParseError when neither source is given.
RunConfig load_run_config(const CommandOptions& opts);

}  // namespace fluorospec::cli

#pragma once

#include <string>
#include <vector>

#include "fluorospec/model.hpp"
#include "fluorospec/trajectories.hpp"

namespace fluorospec::cli {

enum class OutFormat { csv, json_lines };

struct GridSpec {
  double mu_min = -4.0;
  double mu_max = 4.0;
  int mu_count = 801;
  std::vector<double> grid() const;
  void check() const;  ///< mu_count >= 2, mu_max > mu_min
};

struct RunConfig {
  model::PhysParams params;
  traj::SimConfig sim;
  GridSpec grid;
  std::string output_path;  ///< from CLI flags, not part of the config text
  OutFormat format = OutFormat::csv;
  std::string preset;  ///< optional preset name this config came from
};

/// Parses the `key = value` format (one pair per line, `#` comments). Keys:
/// gamma, omega_rabi, delta_omega, n_bar, k_d, alpha1_sq, alpha2_sq, theta1,
/// theta2, c, phi, dt, t_final, t_burn, n_traj, seed, mu_min, mu_max,
/// mu_count. Unknown keys are errors; missing keys keep the defaults of
/// `base`. Angle values also accept `pi`, `-pi`, `pi/2`, `-pi/2`, `2*pi`, ...
/// Throws ParseError (with line number) or ValidationError.
RunConfig parse_config(const std::string& text, const RunConfig& base);
RunConfig parse_config(const std::string& text);

/// Emits the key-value text; parse_config(render_config(cfg)) == cfg.
std::string render_config(const RunConfig& cfg);

/// Figure-caption parameter sets plus the dark-state baseline.
const std::vector<std::string>& preset_names();
RunConfig preset(const std::string& name);  ///< throws ParseError for unknown names

/// Accepts plain numbers and pi literals: pi, -pi, pi/2, -pi/2, 3*pi/4, 2*pi.
double parse_number(const std::string& value);

}  // namespace fluorospec::cli

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fluorospec/model.hpp"

namespace fluorospec::opt {

enum class ObjectiveKind { value_at_mu, min_over_window, fwhm };

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::value_at_mu;
  double mu_target = 0.0;   ///< for value_at_mu
  double window_lo = -4.0;  ///< for min_over_window
  double window_hi = 4.0;
  int window_points = 801;
  void check() const;  ///< throws ValidationError on empty window / bad resolution
};

/// value_at_mu: s_inel(p, mu_target); min_over_window: min of s_inel over the
/// window grid; fwhm: line width of the s_inel - 1 peak.
double objective(const model::PhysParams& p, const ObjectiveSpec& spec);

struct FreeParam {
  std::string name;  ///< config key (omega_rabi, c, theta1, ...)
  double lo = 0.0;
  double hi = 1.0;
};

struct OptimOptions {
  int budget_per_restart = 400;  ///< >= 50
  int restarts = 8;
  std::uint64_t seed = 0;  ///< offset into the multistart low-discrepancy sequence
  double simplex_tol = 1e-6;  ///< convergence diameter in scaled coordinates
  bool allow_alpha = false;   ///< permit alpha1_sq/alpha2_sq as free parameters
};

struct OptimResult {
  model::PhysParams best_params;
  double best_value = 0.0;  ///< objective(best_params), re-evaluated on return
  std::vector<std::pair<std::vector<double>, double>> trace;  ///< (free values, value)
  bool converged = false;  ///< false signals an exhausted budget (best-so-far returned)
  int restarts_used = 0;
  int evaluations = 0;
};

/// Nelder-Mead within the box, multistart from a Halton sequence (offset by
/// seed). Angle parameters move unconstrained and are wrapped periodically at
/// evaluation; other parameters are projected onto their bounds. Evaluations
/// that throw numerically (or violate alpha1_sq + alpha2_sq <= 1 when the
/// alphas are freed) count as +infinity.
OptimResult optimize(const model::PhysParams& base, const std::vector<FreeParam>& free_params,
                     const ObjectiveSpec& spec, const OptimOptions& opts = {});

struct GridAxis {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  int count = 1;
};

struct GridScanResult {
  std::vector<GridAxis> axes;
  std::vector<std::vector<double>> grids;
  std::vector<double> values;  ///< row-major over the axes; +inf where evaluation failed
};

/// Exhaustive evaluation over one or two axes; at most 1e6 points.
GridScanResult grid_scan(const model::PhysParams& base, const std::vector<GridAxis>& axes,
                         const ObjectiveSpec& spec);

}  // namespace fluorospec::opt

#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fluorospec/model.hpp"
#include "fluorospec/qops.hpp"
#include "fluorospec/trajectories.hpp"

namespace fluorospec::spectrum {

enum class Provenance { analytic, autocorr, monte_carlo };

/// Inelastic homodyne spectrum of channel 2 on a frequency grid (rotating
/// frame; mu = 0 is resonance with the stimulating laser). The elastic line
/// S_el(mu) = elastic_weight * delta(mu) with elastic_weight = 2 pi m^2
/// (documented convention; only proportionality to delta is fixed by theory).
struct SpectrumResult {
  std::vector<double> mu;
  std::vector<double> s_inel;
  std::vector<double> stderrs;  ///< empty for analytic provenance
  double elastic_mean = 0.0;    ///< m, the stationary mean current
  double elastic_weight = 0.0;  ///< 2 pi m^2
  Provenance provenance = Provenance::analytic;
};

struct AutocorrResult {
  std::vector<double> lags;
  std::vector<double> values;  ///< stationary autocovariance, delta part excluded
  double mean = 0.0;           ///< m
};

struct QuadratureConfig {
  double tol = 1e-7;            ///< |I(h) - I(h/2)| refinement target
  double trunc_eps = 1e-12;     ///< |C| threshold for truncating the horizon
  double t_max_over_gamma = 1e4;
  int max_refinements = 8;
};

/// Closed form S_inel(mu) = 1 + 2 gamma |a2|^2 s . (A x) with
/// (A^2 + mu^2 Id) x = t and s = (cos theta2, sin theta2, 0). Evaluated as a
/// linear solve; throws SingularDynamics when cond(A^2 + mu^2) > 1e12.
double s_inel(const model::PhysParams& p, double mu);

/// Elementwise s_inel over a grid; elastic fields filled from elastic_line.
SpectrumResult s_inel_grid(const model::PhysParams& p, const std::vector<double>& mu_grid);

/// (m, 2 pi m^2) with m = sqrt(gamma) |a2| <sigma_theta2> at equilibrium.
std::pair<double, double> elastic_line(const model::PhysParams& p);

/// Two-time current correlation with the white-noise delta excluded:
/// gamma Tr{R[a2 s-] e^{|t-s| L_f} R[a2 s-] e^{min(s,t) L_f} rho0}.
double autocorrelation(const model::PhysParams& p, const qops::State2& rho0, double t, double s);

/// C(tau) = gamma Tr{R[a2 s-] e^{tau L_f} R[a2 s-] eta_eq} - m^2; decays to 0.
double stationary_autocovariance(const model::PhysParams& p, double tau);

/// Independent Fourier route: 1 + 2 Int_0^inf cos(mu tau) C(tau) dtau by
/// Richardson-refined composite Simpson on matrix-exponential samples,
/// truncated where |C| stays below trunc_eps. Agrees with s_inel to 1e-5.
/// Throws QuadratureFailure if the horizon exceeds t_max_over_gamma / gamma.
double s_inel_via_autocorr(const model::PhysParams& p, double mu, const QuadratureConfig& quad = {});

/// Welch-style averaged periodogram of the recorded I2 over the post-burn
/// window: segments of 50/gamma, 50% overlap, no taper, evaluated at the
/// segment's Fourier bins inside [min(mu_grid), max(mu_grid)] (negative bins
/// mirror the positive ones). The white-noise floor of the increments
/// contributes the baseline 1 exactly; the mu = 0 bin also carries the
/// elastic line and is excluded from analytic comparisons. Standard errors
/// come from the across-trajectory spread.
SpectrumResult mc_spectrum(const traj::TrajectoryEnsemble& ens, const std::vector<double>& mu_grid);

/// S_inel(mu; theta2) * S_inel(mu; theta2 + pi/2); bounded below by 1.
double heisenberg_product(const model::PhysParams& p, double mu);

struct SqueezeReport {
  double min_value = 0.0;
  double argmin_mu = 0.0;
  bool squeezed = false;  ///< min < 1 - 1e-9
};

SqueezeReport squeezing_report(const model::PhysParams& p, const std::vector<double>& mu_grid);

/// Full width at half maximum of s_inel(mu) - 1, for spectra that form a
/// single positive peak at mu = 0 (scanned on [0, 20 gamma]); bisection to
/// 1e-6 gamma. Throws NotUnimodal otherwise.
double fwhm(const model::PhysParams& p);

/// Closed form from explicitly supplied building blocks. Validation seam:
/// lets the self-test suite inject a corrupted A and watch the
/// spectrum-equivalence check fail.
double s_inel_from_parts(const Eigen::Matrix3d& a, const Eigen::Vector3d& t, double theta2,
                         double gamma, double alpha2_sq, double mu);

}  // namespace fluorospec::spectrum

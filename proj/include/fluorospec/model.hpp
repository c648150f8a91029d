#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fluorospec/qops.hpp"

namespace fluorospec::model {

/// All physical and control parameters. Rates and frequencies share the units
/// of gamma; angles are radians.
struct PhysParams {
  double gamma = 1.0;        ///< natural linewidth, > 0
  double omega_rabi = 0.0;   ///< Rabi frequency, >= 0
  double delta_omega = 0.0;  ///< detuning omega_0 - omega
  double n_bar = 0.0;        ///< thermal photon number, >= 0
  double k_d = 0.0;          ///< dephasing intensity, >= 0
  double alpha1_abs = 0.0;   ///< |alpha_1|, side-channel-1 amplitude
  double alpha2_abs = 0.0;   ///< |alpha_2|, side-channel-2 amplitude
  double theta1 = 0.0;       ///< local-oscillator phase arg alpha_1
  double theta2 = 0.0;       ///< local-oscillator phase arg alpha_2
  double c = 0.0;            ///< feedback gain
  double phi = 0.0;          ///< feedback phase

  double alpha1_sq() const { return alpha1_abs * alpha1_abs; }
  double alpha2_sq() const { return alpha2_abs * alpha2_abs; }
  /// Forward-channel amplitude, derived from |a0|^2 = 1 - |a1|^2 - |a2|^2.
  /// Reporting only; it enters no formula.
  double alpha0_abs() const;
  std::complex<double> alpha1() const;
  std::complex<double> alpha2() const;

  /// Throws ValidationError on hard invariant violations: gamma <= 0, negative
  /// rates, |a1|^2 + |a2|^2 > 1 + 1e-12, non-finite entries.
  void check() const;

  /// Soft issues that do not reject the parameter set, e.g. phi outside
  /// [0, pi) (equivalent to a sign flip of c, so accepted verbatim).
  std::vector<std::string> warnings() const;
};

/// Generator of the unconditional master equation (no feedback):
/// -i[dw/2 sz + W/2 sx, .] + g kd (sz . sz - Id) + g nbar D[s+] + g(nbar+1) D[s-].
qops::Superop liouvillian(const PhysParams& p);

/// Feedback Hamiltonian operator M = c sqrt(gamma) sigma_phi.
qops::Op2 feedback_op(const PhysParams& p);

/// Feedback-shifted detuning dw_c = dw + c gamma |a1| cos(theta1 - phi).
double delta_omega_c(const PhysParams& p);

/// Feedback master-equation generator, assembled term by term from its
/// explicit form (Hamiltonian with dw_c, dephasing, thermal terms, the
/// gamma(nbar+1-|a1|^2) D[s-] term, the sandwich with a1 s- - i c sigma_phi,
/// and the anticommutator with (|a1|^2 - 2c|a1|sin(theta1-phi)) P_+ + c^2).
/// Reduces to liouvillian(p) when c = 0.
qops::Superop feedback_liouvillian(const PhysParams& p);

/// The same generator from the Ito composition of the feedback unitary with
/// the no-feedback propagator: L + M^2/2 + sqrt(gamma) M o R[a1 s-], where
/// M rho = -i[M, rho]. Agrees with feedback_liouvillian elementwise to 1e-10;
/// the two constructions are kept as independent codings.
qops::Superop feedback_liouvillian_composed(const PhysParams& p);

/// Unique stationary state of the feedback generator, from the 3x3 affine
/// Bloch system B v = -k (trace preservation fixes w = 1 exactly). Throws
/// SingularDynamics when cond(B) > 1e12.
qops::State2 equilibrium(const PhysParams& p);

/// Relaxation matrix A of the spectrum formula, assembled entry by entry
/// from its explicit coefficients.
Eigen::Matrix3d a_matrix(const PhysParams& p);

/// t = Tr{(e^{i theta2} s- eta + e^{-i theta2} eta s+ - <sigma_theta2> eta) sigma_k}
/// at eta = equilibrium(p). The operator in braces is Hermitian and traceless,
/// so t is real; an imaginary residue above 1e-12 throws.
Eigen::Vector3d t_vector(const PhysParams& p);

struct BlochDrift {
  Eigen::Matrix3d b;  ///< homogeneous part
  Eigen::Vector3d k;  ///< inhomogeneous part
};

/// Affine action on (x, y, z) of a trace-preserving generator:
/// d/dt (x,y,z) = B (x,y,z) + k. Rejects non-trace-preserving input.
///
/// Empirically (and exercised by the test suite), the Bloch drift of the
/// feedback generator relates to the spectrum matrix as B = -A; no code path
/// that affects results assumes this, A is always built from its own formula.
BlochDrift bloch_drift(const qops::Superop& g);

// Parameter access by config key (gamma, omega_rabi, delta_omega, n_bar, k_d,
// alpha1_sq, alpha2_sq, theta1, theta2, c, phi). The alpha keys read and write
// the squared amplitudes. Throws std::invalid_argument for unknown names.
double get_param(const PhysParams& p, const std::string& name);
void set_param(PhysParams& p, const std::string& name, double value);
const std::vector<std::string>& param_names();
bool is_angle_param(const std::string& name);

}  // namespace fluorospec::model

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fluorospec/model.hpp"
#include "fluorospec/qops.hpp"

namespace fluorospec::traj {

/// Euler-Maruyama integration setup. Times share the units of 1/gamma.
struct SimConfig {
  double dt = 1e-3;
  double t_final = 400.0;
  double t_burn = 40.0;       ///< transient discarded before spectral estimation
  int n_traj = 400;
  std::uint64_t seed = 1;
  bool record_states = false;
  int record_stride = 10;     ///< recorded-grid spacing = record_stride * dt
  int n_threads = 0;          ///< 0 = hardware concurrency; never affects results

  /// Physical runs abort with PositivityBreach when a state eigenvalue drops
  /// below -positivity_tol. The explicit scheme jitters across the Bloch
  /// sphere by O(dt) whenever the conditional state purifies (transient
  /// eigenvalue excursions reach ~3e-2 at dt = 1e-3 for 90% total detection
  /// efficiency, shrinking linearly with dt), so the default guards against
  /// genuine runaway rather than against that jitter; tighten it when running
  /// with small dt.
  double positivity_tol = 0.1;

  double dt_record() const { return dt * record_stride; }
  void check() const;  ///< throws ValidationError on invalid settings
};

enum class Measure { reference, physical };

/// Sampled ensemble. Recorded times are block right edges t_k = (k+1) dt_rec;
/// currents[k] is the noise increment over (t_k - dt_rec, t_k] divided by
/// dt_rec, states/weights are sampled at t_k.
struct TrajectoryEnsemble {
  std::vector<double> times;
  std::vector<std::vector<double>> i1;  ///< [traj][k]
  std::vector<std::vector<double>> i2;
  std::vector<std::vector<double>> weights;             ///< reference runs: p_t
  std::vector<std::vector<Eigen::Vector4d>> states;     ///< coords, if recorded
  Measure measure = Measure::reference;
  model::PhysParams params;
  SimConfig config;
  bool step_size_warning = false;

  int n_traj() const { return static_cast<int>(i2.size()); }
  int n_rec() const { return static_cast<int>(times.size()); }

  /// State view of a recorded sample. Physical paths carry transient negative
  /// eigenvalues from the discretization; by default anything the run did not
  /// abort on (eigenvalue >= -positivity_tol) converts.
  qops::State2 state_at(int traj, int k) const;
  qops::State2 state_at(int traj, int k, double eig_tol) const;
};

/// Noise operators of the two measurement channels:
/// m1 = sqrt(gamma) (alpha1 s- - i c sigma_phi), m2 = sqrt(gamma) alpha2 s-.
std::pair<qops::Op2, qops::Op2> noise_ops(const model::PhysParams& p);

/// One Euler-Maruyama step of the linear (unnormalized) equation:
/// sigma + L_f sigma dt + R[m1] sigma dW1 + R[m2] sigma dW2, exactly
/// Hermitian-symmetrized. Linear in sigma.
qops::Op2 step_linear(const qops::Op2& sigma, double dw1, double dw2,
                      const model::PhysParams& p, double dt);

/// Girsanov drifts v1 = 2 sqrt(g) Re Tr{(a1 s- - i c sigma_phi) rho},
/// v2 = 2 sqrt(g) Re(a2 Tr{s- rho}).
std::pair<double, double> velocities(const qops::State2& rho, const model::PhysParams& p);

/// Reference-measure run: linear equation, currents are pure white noise
/// increments, likelihood weights p_t = Tr sigma_t recorded at every output
/// time. Deterministic given (seed, cfg, p) for any thread count.
TrajectoryEnsemble simulate_reference(const model::PhysParams& p, const SimConfig& cfg,
                                      const qops::State2& rho0 = qops::State2::ground());

/// Physical-measure run: normalized states, currents I_j = v_j + dB_j/dt.
/// States are renormalized each step; eigenvalues in [-1e-4, 0) are tolerated
/// (clamped only inside the velocity computation), below -1e-4 the run aborts
/// with PositivityBreach.
TrajectoryEnsemble simulate_physical(const model::PhysParams& p, const SimConfig& cfg,
                                     const qops::State2& rho0 = qops::State2::ground());

struct AutocorrEstimate {
  std::vector<double> lags;
  std::vector<double> values;   ///< mean of I2(t) I2(t+lag) over the stationary window
  std::vector<double> stderrs;  ///< across-trajectory standard errors
};

/// Empirical second moment of I2 at the given lags (multiples of the recorded
/// spacing) over times > t_burn. Lag 0 contains the discretized delta spike
/// ~1/dt_rec and is reported as-is. Physical-measure ensembles only.
/// Throws InsufficientWindow if t_final - t_burn < 10 * max lag.
AutocorrEstimate empirical_autocorr(const TrajectoryEnsemble& ens,
                                    const std::vector<double>& lags);

}  // namespace fluorospec::traj

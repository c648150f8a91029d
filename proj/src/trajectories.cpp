#include "fluorospec/trajectories.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <stdexcept>
#include <thread>

#include "fluorospec/errors.hpp"
#include "fluorospec/rng.hpp"

namespace fluorospec::traj {

using qops::Op2;

namespace {
const std::complex<double> kI(0.0, 1.0);

struct StepMatrices {
  Eigen::Matrix4d g;   // feedback generator
  Eigen::Matrix4d n1;  // R[m1]
  Eigen::Matrix4d n2;  // R[m2]
  double max_rate = 0.0;
};

StepMatrices make_step_matrices(const model::PhysParams& p) {
  StepMatrices sm;
  sm.g = model::feedback_liouvillian(p).matrix();
  const auto [m1, m2] = noise_ops(p);
  sm.n1 = qops::rmap(m1).matrix();
  sm.n2 = qops::rmap(m2).matrix();
  sm.max_rate = sm.g.eigenvalues().cwiseAbs().maxCoeff();
  return sm;
}

// Runs trajectories [lo, hi) and stores results in index order; shared
// inputs are immutable, so the partition across threads is irrelevant to
// the output.
template <typename Body>
void run_partitioned(int n_traj, int n_threads, const Body& body) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  const int workers = std::min(n_traj, n_threads > 0 ? n_threads : hw);
  if (workers <= 1) {
    body(0, n_traj);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  const int chunk = (n_traj + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int lo = w * chunk;
    const int hi = std::min(n_traj, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([&, lo, hi, w] {
      try {
        body(lo, hi);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}
}  // namespace

void SimConfig::check() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("SimConfig: dt must be > 0");
  if (!(t_final > 0.0)) throw ValidationError("SimConfig: t_final must be > 0");
  if (dt > t_final) throw ValidationError("SimConfig: dt must not exceed t_final");
  if (t_burn < 0.0 || t_burn >= t_final)
    throw ValidationError("SimConfig: t_burn must lie in [0, t_final)");
  if (n_traj < 1) throw ValidationError("SimConfig: n_traj must be >= 1");
  if (record_stride < 1) throw ValidationError("SimConfig: record_stride must be >= 1");
}

qops::State2 TrajectoryEnsemble::state_at(int traj, int k, double eig_tol) const {
  Eigen::Vector4d c = states.at(traj).at(k);
  if (measure == Measure::reference) c /= c[0];  // a posteriori state rho = sigma / Tr sigma
  return qops::State2::from_op(qops::coords_op(c), eig_tol);
}

std::pair<Op2, Op2> noise_ops(const model::PhysParams& p) {
  const double root_gamma = std::sqrt(p.gamma);
  const Op2 m1 = root_gamma * (p.alpha1() * qops::sigma_minus() - kI * p.c * qops::sigma_phi(p.phi));
  const Op2 m2 = root_gamma * (p.alpha2() * qops::sigma_minus());
  return {m1, m2};
}

Op2 step_linear(const Op2& sigma, double dw1, double dw2, const model::PhysParams& p, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_linear: dt must be > 0");
  const qops::Superop lf = model::feedback_liouvillian(p);
  const auto [m1, m2] = noise_ops(p);
  Op2 out = sigma + lf(sigma) * dt + (m1 * sigma + sigma * m1.adjoint()) * dw1 +
            (m2 * sigma + sigma * m2.adjoint()) * dw2;
  return 0.5 * (out + Op2(out.adjoint()));
}

std::pair<double, double> velocities(const qops::State2& rho, const model::PhysParams& p) {
  const double root_gamma = std::sqrt(p.gamma);
  const Op2 a1_op = p.alpha1() * qops::sigma_minus() - kI * p.c * qops::sigma_phi(p.phi);
  const double v1 = 2.0 * root_gamma * (a1_op * rho.op()).trace().real();
  const double v2 = 2.0 * root_gamma * (p.alpha2() * (qops::sigma_minus() * rho.op()).trace()).real();
  return {v1, v2};
}

namespace {

TrajectoryEnsemble prepare(const model::PhysParams& p, const SimConfig& cfg, Measure measure,
                           const StepMatrices& sm) {
  TrajectoryEnsemble ens;
  ens.measure = measure;
  ens.params = p;
  ens.config = cfg;

  const long long n_steps = std::llround(cfg.t_final / cfg.dt);
  const int n_rec = static_cast<int>(n_steps / cfg.record_stride);
  if (n_rec < 1) throw ValidationError("SimConfig: no complete recording block in [0, t_final]");

  ens.times.resize(n_rec);
  for (int k = 0; k < n_rec; ++k) ens.times[k] = (k + 1) * cfg.dt_record();

  ens.i1.assign(cfg.n_traj, std::vector<double>(n_rec));
  ens.i2.assign(cfg.n_traj, std::vector<double>(n_rec));
  if (measure == Measure::reference)
    ens.weights.assign(cfg.n_traj, std::vector<double>(n_rec));
  if (cfg.record_states)
    ens.states.assign(cfg.n_traj, std::vector<Eigen::Vector4d>(n_rec));

  if (cfg.dt * sm.max_rate > 0.05) {
    ens.step_size_warning = true;
    std::fprintf(stderr,
                 "StepSizeWarning: dt * max|eigenvalue(L_f)| = %.3g exceeds 0.05; "
                 "statistics may carry visible discretization bias\n",
                 cfg.dt * sm.max_rate);
  }
  return ens;
}

}  // namespace

TrajectoryEnsemble simulate_reference(const model::PhysParams& p, const SimConfig& cfg,
                                      const qops::State2& rho0) {
  p.check();
  cfg.check();
  const StepMatrices sm = make_step_matrices(p);
  TrajectoryEnsemble ens = prepare(p, cfg, Measure::reference, sm);

  const int n_rec = ens.n_rec();
  const double sqrt_dt = std::sqrt(cfg.dt);
  const Eigen::Vector4d u0 = rho0.coords();

  run_partitioned(cfg.n_traj, cfg.n_threads, [&](int lo, int hi) {
    for (int traj = lo; traj < hi; ++traj) {
      rng::NormalStream noise(cfg.seed, static_cast<std::uint64_t>(traj));
      Eigen::Vector4d u = u0;
      for (int k = 0; k < n_rec; ++k) {
        double dw1_sum = 0.0, dw2_sum = 0.0;
        for (int s = 0; s < cfg.record_stride; ++s) {
          const double dw1 = noise.next() * sqrt_dt;
          const double dw2 = noise.next() * sqrt_dt;
          u += (sm.g * u) * cfg.dt + (sm.n1 * u) * dw1 + (sm.n2 * u) * dw2;
          dw1_sum += dw1;
          dw2_sum += dw2;
        }
        if (!(u[0] > 0.0))
          throw PositivityBreach("simulate_reference: likelihood weight became non-positive; reduce dt");
        ens.i1[traj][k] = dw1_sum / cfg.dt_record();
        ens.i2[traj][k] = dw2_sum / cfg.dt_record();
        ens.weights[traj][k] = u[0];
        if (cfg.record_states) ens.states[traj][k] = u;
      }
    }
  });
  return ens;
}

TrajectoryEnsemble simulate_physical(const model::PhysParams& p, const SimConfig& cfg,
                                     const qops::State2& rho0) {
  p.check();
  cfg.check();
  const StepMatrices sm = make_step_matrices(p);
  TrajectoryEnsemble ens = prepare(p, cfg, Measure::physical, sm);

  const int n_rec = ens.n_rec();
  const double sqrt_dt = std::sqrt(cfg.dt);
  const Eigen::Vector4d q0 = rho0.coords();

  run_partitioned(cfg.n_traj, cfg.n_threads, [&](int lo, int hi) {
    for (int traj = lo; traj < hi; ++traj) {
      rng::NormalStream noise(cfg.seed, static_cast<std::uint64_t>(traj));
      Eigen::Vector4d q = q0;
      for (int k = 0; k < n_rec; ++k) {
        double acc1 = 0.0, acc2 = 0.0;
        for (int s = 0; s < cfg.record_stride; ++s) {
          const double r = q.tail<3>().norm();
          // Smallest eigenvalue of the unit-trace state is (1 - r)/2.
          if ((1.0 - r) / 2.0 < -1e-4)
            throw PositivityBreach("simulate_physical: state eigenvalue below -1e-4; reduce dt");
          Eigen::Vector4d q_v = q;
          if (r > 1.0) q_v.tail<3>() /= r;  // clamp only for the velocity evaluation
          const double v1 = sm.n1.row(0).dot(q_v);
          const double v2 = sm.n2.row(0).dot(q_v);

          const double db1 = noise.next() * sqrt_dt;
          const double db2 = noise.next() * sqrt_dt;
          q += (sm.g * q) * cfg.dt + (sm.n1 * q - v1 * q) * db1 + (sm.n2 * q - v2 * q) * db2;
          q /= q[0];
          acc1 += v1 * cfg.dt + db1;
          acc2 += v2 * cfg.dt + db2;
        }
        ens.i1[traj][k] = acc1 / cfg.dt_record();
        ens.i2[traj][k] = acc2 / cfg.dt_record();
        if (cfg.record_states) ens.states[traj][k] = q;
      }
    }
  });
  return ens;
}

AutocorrEstimate empirical_autocorr(const TrajectoryEnsemble& ens, const std::vector<double>& lags) {
  if (ens.measure != Measure::physical)
    throw std::invalid_argument("empirical_autocorr: physical-measure ensemble required");
  const double dt_rec = ens.config.dt_record();
  const int n_rec = ens.n_rec();
  const int n_traj = ens.n_traj();

  double max_lag = 0.0;
  std::vector<int> lag_idx;
  lag_idx.reserve(lags.size());
  for (double lag : lags) {
    const long long m = std::llround(lag / dt_rec);
    if (m < 0 || std::abs(m * dt_rec - lag) > 1e-9)
      throw std::invalid_argument("empirical_autocorr: lags must be non-negative multiples of the recorded spacing");
    lag_idx.push_back(static_cast<int>(m));
    max_lag = std::max(max_lag, lag);
  }
  const double window = ens.times.back() - ens.config.t_burn;
  if (window < 10.0 * max_lag)
    throw InsufficientWindow("empirical_autocorr: stationary window shorter than 10 * max lag");

  // First block fully inside the stationary window.
  int k0 = 0;
  while (k0 < n_rec && ens.times[k0] - dt_rec < ens.config.t_burn - 1e-9) ++k0;

  AutocorrEstimate out;
  out.lags = lags;
  out.values.resize(lags.size());
  out.stderrs.resize(lags.size());
  std::vector<double> per_traj(n_traj);
  for (std::size_t li = 0; li < lag_idx.size(); ++li) {
    const int m = lag_idx[li];
    if (n_rec - m - k0 < 1)
      throw InsufficientWindow("empirical_autocorr: no complete pair at requested lag");
    for (int traj = 0; traj < n_traj; ++traj) {
      const auto& i2 = ens.i2[traj];
      double acc = 0.0;
      for (int k = k0; k + m < n_rec; ++k) acc += i2[k] * i2[k + m];
      per_traj[traj] = acc / static_cast<double>(n_rec - m - k0);
    }
    double mean = 0.0;
    for (double v : per_traj) mean += v;
    mean /= n_traj;
    double var = 0.0;
    for (double v : per_traj) var += (v - mean) * (v - mean);
    var = n_traj > 1 ? var / (n_traj - 1) : 0.0;
    out.values[li] = mean;
    out.stderrs[li] = std::sqrt(var / n_traj);
  }
  return out;
}

}  // namespace fluorospec::traj

#include "fluorospec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

#include "fluorospec/errors.hpp"

namespace fluorospec::spectrum {

namespace {
constexpr double kPi = 3.14159265358979323846;

// mu-independent pieces of the closed form.
struct ClosedFormParts {
  Eigen::Matrix3d a;
  Eigen::Vector3d t;
  double gamma = 1.0;
  double alpha2_sq = 0.0;
  double theta2 = 0.0;
};

ClosedFormParts make_parts(const model::PhysParams& p) {
  p.check();
  ClosedFormParts parts;
  parts.a = model::a_matrix(p);
  parts.t = model::t_vector(p);
  parts.gamma = p.gamma;
  parts.alpha2_sq = p.alpha2_sq();
  parts.theta2 = p.theta2;
  return parts;
}

double eval_closed_form(const ClosedFormParts& parts, double mu) {
  return s_inel_from_parts(parts.a, parts.t, parts.theta2, parts.gamma, parts.alpha2_sq, mu);
}

// Ingredients of the time-domain (autocorrelation) route.
struct AutocorrEngine {
  Eigen::Matrix4d g;   // feedback generator
  Eigen::Matrix4d r2;  // R[alpha2 sigma-]
  Eigen::Vector4d phi0;  // R[alpha2 sigma-] eta_eq
  double gamma = 1.0;
  double mean = 0.0;   // m
  double max_rate = 0.0;
};

AutocorrEngine make_autocorr_engine(const model::PhysParams& p) {
  AutocorrEngine e;
  e.g = model::feedback_liouvillian(p).matrix();
  e.r2 = qops::rmap(p.alpha2() * qops::sigma_minus()).matrix();
  const Eigen::Vector4d eta = model::equilibrium(p).coords();
  e.phi0 = e.r2 * eta;
  e.gamma = p.gamma;
  // Tr{R[a2 s-] eta} = |a2| <sigma_theta2>, so m = sqrt(gamma) * that trace.
  e.mean = std::sqrt(p.gamma) * e.phi0[0];
  e.max_rate = e.g.eigenvalues().cwiseAbs().maxCoeff();
  return e;
}

double autocov_from(const AutocorrEngine& e, const Eigen::Vector4d& propagated) {
  return e.gamma * (e.r2 * propagated)[0] - e.mean * e.mean;
}
}  // namespace

double s_inel_from_parts(const Eigen::Matrix3d& a, const Eigen::Vector3d& t, double theta2,
                         double gamma, double alpha2_sq, double mu) {
  if (!std::isfinite(mu)) throw std::invalid_argument("s_inel: mu must be finite");
  const Eigen::Matrix3d m = a * a + mu * mu * Eigen::Matrix3d::Identity();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m);
  const double smin = svd.singularValues()(2);
  const double smax = svd.singularValues()(0);
  if (!(smin > 0.0) || smax / smin > 1e12)
    throw SingularDynamics("s_inel: A^2 + mu^2 is numerically singular");
  const Eigen::Vector3d x = m.partialPivLu().solve(t);
  const Eigen::Vector3d s(std::cos(theta2), std::sin(theta2), 0.0);
  return 1.0 + 2.0 * gamma * alpha2_sq * s.dot(a * x);
}

double s_inel(const model::PhysParams& p, double mu) {
  return eval_closed_form(make_parts(p), mu);
}

SpectrumResult s_inel_grid(const model::PhysParams& p, const std::vector<double>& mu_grid) {
  const ClosedFormParts parts = make_parts(p);
  SpectrumResult res;
  res.mu = mu_grid;
  res.s_inel.reserve(mu_grid.size());
  for (double mu : mu_grid) res.s_inel.push_back(eval_closed_form(parts, mu));
  const auto [m, weight] = elastic_line(p);
  res.elastic_mean = m;
  res.elastic_weight = weight;
  res.provenance = Provenance::analytic;
  return res;
}

std::pair<double, double> elastic_line(const model::PhysParams& p) {
  p.check();
  const qops::Op2 eta = model::equilibrium(p).op();
  const double quad_mean = (qops::sigma_phi(p.theta2) * eta).trace().real();
  const double m = std::sqrt(p.gamma) * p.alpha2_abs * quad_mean;
  return {m, 2.0 * kPi * m * m};
}

double autocorrelation(const model::PhysParams& p, const qops::State2& rho0, double t, double s) {
  if (t < 0.0 || s < 0.0) throw std::invalid_argument("autocorrelation: times must be >= 0");
  p.check();
  const qops::Superop g = model::feedback_liouvillian(p);
  const Eigen::Matrix4d r2 = qops::rmap(p.alpha2() * qops::sigma_minus()).matrix();
  const Eigen::Vector4d u = qops::expm(g, std::min(s, t)).matrix() * rho0.coords();
  const Eigen::Vector4d w = qops::expm(g, std::abs(t - s)).matrix() * (r2 * u);
  return p.gamma * (r2 * w)[0];
}

double stationary_autocovariance(const model::PhysParams& p, double tau) {
  if (tau < 0.0) throw std::invalid_argument("stationary_autocovariance: tau must be >= 0");
  const AutocorrEngine e = make_autocorr_engine(p);
  const Eigen::Vector4d u = (tau * e.g).exp() * e.phi0;
  return autocov_from(e, u);
}

namespace {

// Composite Simpson of f(tau) = cos(mu tau) C(tau) on [0, n*h] with the
// integrand sampled by propagating e^{h G} (one 4x4 matvec per node).
double simpson_march(const AutocorrEngine& e, double mu, double h, long long n) {
  const Eigen::Matrix4d step = (h * e.g).exp();
  Eigen::Vector4d u = e.phi0;
  double acc = autocov_from(e, u);  // f(0), cos(0) = 1
  for (long long j = 1; j < n; ++j) {
    u = step * u;
    acc += (j % 2 == 1 ? 4.0 : 2.0) * std::cos(mu * j * h) * autocov_from(e, u);
  }
  u = step * u;
  acc += std::cos(mu * n * h) * autocov_from(e, u);
  return acc * h / 3.0;
}

}  // namespace

double s_inel_via_autocorr(const model::PhysParams& p, double mu, const QuadratureConfig& quad) {
  if (!std::isfinite(mu)) throw std::invalid_argument("s_inel_via_autocorr: mu must be finite");
  const AutocorrEngine e = make_autocorr_engine(p);
  const double t_max = quad.t_max_over_gamma / p.gamma;

  // Truncation horizon: march until |C| stays below trunc_eps for a full
  // probe window, so isolated zero crossings of an oscillatory C don't stop
  // the scan early.
  const double h_probe = std::min(0.05, 0.25 / std::max(1e-3, e.max_rate));
  const Eigen::Matrix4d probe_step = (h_probe * e.g).exp();
  Eigen::Vector4d u = e.phi0;
  double t_trunc = -1.0;
  int quiet = 0;
  const int quiet_needed = 50;
  for (long long j = 1;; ++j) {
    u = probe_step * u;
    const double tau = j * h_probe;
    if (std::abs(autocov_from(e, u)) < quad.trunc_eps) {
      if (++quiet >= quiet_needed) {
        t_trunc = tau;
        break;
      }
    } else {
      quiet = 0;
    }
    if (tau > t_max)
      throw QuadratureFailure("s_inel_via_autocorr: autocovariance did not decay within the horizon cap");
  }

  // Richardson-controlled composite Simpson.
  double h = std::min({0.02, 0.5 / std::max(1e-3, e.max_rate), 0.5 / std::max(1e-3, std::abs(mu))});
  long long n = 2 * std::max<long long>(1, std::llround(t_trunc / (2.0 * h)));
  h = t_trunc / static_cast<double>(n);
  double prev = simpson_march(e, mu, h, n);
  for (int k = 0; k < quad.max_refinements; ++k) {
    n *= 2;
    h *= 0.5;
    const double cur = simpson_march(e, mu, h, n);
    if (std::abs(cur - prev) <= quad.tol) return 1.0 + 2.0 * cur;
    prev = cur;
  }
  throw QuadratureFailure("s_inel_via_autocorr: Simpson refinement did not reach tolerance");
}

SpectrumResult mc_spectrum(const traj::TrajectoryEnsemble& ens, const std::vector<double>& mu_grid) {
  if (ens.measure != traj::Measure::physical)
    throw std::invalid_argument("mc_spectrum: physical-measure ensemble required");
  if (mu_grid.empty()) throw std::invalid_argument("mc_spectrum: empty grid");
  const double gamma = ens.params.gamma;
  const double dt_rec = ens.config.dt_record();
  const double window = ens.times.back() - ens.config.t_burn;
  if (window < 100.0 / gamma)
    throw InsufficientWindow("mc_spectrum: post-burn window shorter than 100/gamma");

  const int n_rec = ens.n_rec();
  int k0 = 0;
  while (k0 < n_rec && ens.times[k0] - dt_rec < ens.config.t_burn - 1e-9) ++k0;
  const int n_window = n_rec - k0;

  const int seg_len = static_cast<int>(std::llround(50.0 / gamma / dt_rec));
  if (seg_len < 2 || n_window < seg_len)
    throw InsufficientWindow("mc_spectrum: window does not hold one 50/gamma segment");
  const int hop = seg_len / 2;
  const int n_seg = (n_window - seg_len) / hop + 1;
  const double t_seg = seg_len * dt_rec;
  const double dmu = 2.0 * kPi / t_seg;

  const double mu_hi = *std::max_element(mu_grid.begin(), mu_grid.end());
  const double mu_lo = *std::min_element(mu_grid.begin(), mu_grid.end());
  const int n_bins = static_cast<int>(std::floor(mu_hi / dmu + 1e-9)) + 1;  // bins 0..n_bins-1
  if (n_bins < 1) throw std::invalid_argument("mc_spectrum: grid holds no Fourier bin");

  const int n_traj = ens.n_traj();
  std::vector<std::vector<double>> per_traj(n_traj, std::vector<double>(n_bins, 0.0));
  std::vector<double> traj_mean(n_traj, 0.0);

  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  const int workers = std::min(n_traj, ens.config.n_threads > 0 ? ens.config.n_threads : hw);
  auto body = [&](int lo, int hi) {
    for (int traj = lo; traj < hi; ++traj) {
      const auto& cur = ens.i2[traj];
      double mean_acc = 0.0;
      for (int k = k0; k < n_rec; ++k) mean_acc += cur[k];
      traj_mean[traj] = mean_acc / n_window;
      for (int b = 0; b < n_bins; ++b) {
        const double mu = b * dmu;
        const std::complex<double> rot = std::exp(std::complex<double>(0.0, mu * dt_rec));
        double p_acc = 0.0;
        for (int s = 0; s < n_seg; ++s) {
          const int base = k0 + s * hop;
          std::complex<double> acc = 0.0;
          std::complex<double> ph = 1.0;
          for (int j = 0; j < seg_len; ++j) {
            acc += cur[base + j] * ph;
            ph *= rot;
          }
          p_acc += std::norm(acc * dt_rec) / t_seg;
        }
        per_traj[traj][b] = p_acc / n_seg;
      }
    }
  };
  if (workers <= 1) {
    body(0, n_traj);
  } else {
    std::vector<std::thread> threads;
    const int chunk = (n_traj + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int lo = w * chunk;
      const int hi = std::min(n_traj, lo + chunk);
      if (lo < hi) threads.emplace_back(body, lo, hi);
    }
    for (auto& t : threads) t.join();
  }

  std::vector<double> mean(n_bins, 0.0), err(n_bins, 0.0);
  for (int b = 0; b < n_bins; ++b) {
    double m = 0.0;
    for (int traj = 0; traj < n_traj; ++traj) m += per_traj[traj][b];
    m /= n_traj;
    double var = 0.0;
    for (int traj = 0; traj < n_traj; ++traj) {
      const double d = per_traj[traj][b] - m;
      var += d * d;
    }
    var = n_traj > 1 ? var / (n_traj - 1) : 0.0;
    mean[b] = m;
    err[b] = std::sqrt(var / n_traj);
  }

  double m_hat = 0.0;
  for (double v : traj_mean) m_hat += v;
  m_hat /= n_traj;

  SpectrumResult res;
  res.provenance = Provenance::monte_carlo;
  res.elastic_mean = m_hat;
  res.elastic_weight = 2.0 * kPi * m_hat * m_hat;
  // Mirror bins into the negative range covered by the request; the
  // periodogram of a real series is even in mu.
  for (int b = n_bins - 1; b >= 1; --b) {
    if (-b * dmu < mu_lo - 1e-12) continue;
    res.mu.push_back(-b * dmu);
    res.s_inel.push_back(mean[b]);
    res.stderrs.push_back(err[b]);
  }
  for (int b = 0; b < n_bins; ++b) {
    res.mu.push_back(b * dmu);
    res.s_inel.push_back(mean[b]);
    res.stderrs.push_back(err[b]);
  }
  return res;
}

double heisenberg_product(const model::PhysParams& p, double mu) {
  model::PhysParams conj = p;
  conj.theta2 = p.theta2 + kPi / 2.0;
  return s_inel(p, mu) * s_inel(conj, mu);
}

SqueezeReport squeezing_report(const model::PhysParams& p, const std::vector<double>& mu_grid) {
  if (mu_grid.empty()) throw std::invalid_argument("squeezing_report: empty grid");
  const ClosedFormParts parts = make_parts(p);
  SqueezeReport rep;
  rep.min_value = std::numeric_limits<double>::infinity();
  for (double mu : mu_grid) {
    const double v = eval_closed_form(parts, mu);
    if (v < rep.min_value) {
      rep.min_value = v;
      rep.argmin_mu = mu;
    }
  }
  rep.squeezed = rep.min_value < 1.0 - 1e-9;
  return rep;
}

double fwhm(const model::PhysParams& p) {
  const ClosedFormParts parts = make_parts(p);
  const double gamma = p.gamma;
  const int n = 2001;
  const double mu_max = 20.0 * gamma;
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i)
    f[i] = eval_closed_form(parts, mu_max * i / (n - 1)) - 1.0;

  if (!(f[0] > 0.0)) throw NotUnimodal("fwhm: s_inel(0) - 1 is not positive");
  int n_max = 0;
  int argmax = -1;
  for (int i = 0; i < n; ++i) {
    const bool left_ok = (i == 0) || f[i] > f[i - 1];
    const bool right_ok = (i == n - 1) || f[i] > f[i + 1];
    if (left_ok && right_ok) {
      ++n_max;
      argmax = i;
    }
  }
  if (n_max != 1 || argmax != 0)
    throw NotUnimodal("fwhm: scan on [0, 20 gamma] is not a single peak at mu = 0");
  const double half = f[0] / 2.0;
  if (!(f[n - 1] < half)) throw NotUnimodal("fwhm: half maximum not reached within the scan");

  int j = 1;
  while (f[j] >= half) ++j;
  double lo = mu_max * (j - 1) / (n - 1);
  double hi = mu_max * j / (n - 1);
  while (hi - lo > 1e-7 * gamma) {
    const double mid = 0.5 * (lo + hi);
    if (eval_closed_form(parts, mid) - 1.0 >= half)
      lo = mid;
    else
      hi = mid;
  }
  return 2.0 * 0.5 * (lo + hi);
}

}  // namespace fluorospec::spectrum

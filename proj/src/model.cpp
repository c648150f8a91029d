#include "fluorospec/model.hpp"

#include <cmath>
#include <stdexcept>

#include "fluorospec/errors.hpp"

namespace fluorospec::model {

using qops::Op2;
using qops::Superop;
using std::complex;

namespace {
const complex<double> kI(0.0, 1.0);
constexpr double kPi = 3.14159265358979323846;
}  // namespace

double PhysParams::alpha0_abs() const {
  return std::sqrt(std::max(0.0, 1.0 - alpha1_sq() - alpha2_sq()));
}

complex<double> PhysParams::alpha1() const { return alpha1_abs * std::exp(kI * theta1); }
complex<double> PhysParams::alpha2() const { return alpha2_abs * std::exp(kI * theta2); }

void PhysParams::check() const {
  const double vals[] = {gamma, omega_rabi, delta_omega, n_bar,  k_d, alpha1_abs,
                         alpha2_abs, theta1, theta2, c, phi};
  for (double v : vals)
    if (!std::isfinite(v)) throw ValidationError("PhysParams: non-finite parameter");
  if (!(gamma > 0.0)) throw ValidationError("PhysParams: gamma must be > 0");
  if (omega_rabi < 0.0) throw ValidationError("PhysParams: omega_rabi must be >= 0");
  if (n_bar < 0.0) throw ValidationError("PhysParams: n_bar must be >= 0");
  if (k_d < 0.0) throw ValidationError("PhysParams: k_d must be >= 0");
  if (alpha1_abs < 0.0 || alpha2_abs < 0.0)
    throw ValidationError("PhysParams: channel amplitudes must be >= 0");
  if (alpha1_sq() + alpha2_sq() > 1.0 + 1e-12)
    throw ValidationError("PhysParams: alpha1_sq + alpha2_sq exceeds 1");
}

std::vector<std::string> PhysParams::warnings() const {
  std::vector<std::string> w;
  if (phi < 0.0 || phi >= kPi)
    w.push_back("phi outside [0, pi); used verbatim (sigma_{phi+pi} = -sigma_phi flips the sign of c)");
  return w;
}

Superop liouvillian(const PhysParams& p) {
  p.check();
  const Op2 h = 0.5 * p.delta_omega * qops::sigma_z() + 0.5 * p.omega_rabi * qops::sigma_x();
  Superop l = qops::commutator_map(h);
  if (p.k_d > 0.0)
    l = l + p.gamma * p.k_d * (qops::sandwich_map(qops::sigma_z()) - Superop::identity_map());
  if (p.n_bar > 0.0) l = l + p.gamma * p.n_bar * qops::dissipator(qops::sigma_plus());
  l = l + p.gamma * (p.n_bar + 1.0) * qops::dissipator(qops::sigma_minus());
  return l;
}

Op2 feedback_op(const PhysParams& p) {
  return p.c * std::sqrt(p.gamma) * qops::sigma_phi(p.phi);
}

double delta_omega_c(const PhysParams& p) {
  return p.delta_omega + p.c * p.gamma * p.alpha1_abs * std::cos(p.theta1 - p.phi);
}

Superop feedback_liouvillian(const PhysParams& p) {
  p.check();
  const Op2 h = 0.5 * delta_omega_c(p) * qops::sigma_z() + 0.5 * p.omega_rabi * qops::sigma_x();
  Superop l = qops::commutator_map(h);
  if (p.k_d > 0.0)
    l = l + p.gamma * p.k_d * (qops::sandwich_map(qops::sigma_z()) - Superop::identity_map());
  if (p.n_bar > 0.0) l = l + p.gamma * p.n_bar * qops::dissipator(qops::sigma_plus());
  l = l + p.gamma * (p.n_bar + 1.0 - p.alpha1_sq()) * qops::dissipator(qops::sigma_minus());
  const Op2 k_op = p.alpha1() * qops::sigma_minus() - kI * p.c * qops::sigma_phi(p.phi);
  l = l + p.gamma * qops::sandwich_map(k_op);
  const Op2 anti = (p.alpha1_sq() - 2.0 * p.c * p.alpha1_abs * std::sin(p.theta1 - p.phi)) *
                       qops::proj_excited() +
                   p.c * p.c * qops::identity2();
  l = l - 0.5 * p.gamma * qops::anticommutator_map(anti);
  return l;
}

Superop feedback_liouvillian_composed(const PhysParams& p) {
  p.check();
  const Superop l = liouvillian(p);
  const Superop m = qops::commutator_map(feedback_op(p));
  const Superop r1 = qops::rmap(p.alpha1() * qops::sigma_minus());
  return l + 0.5 * (m * m) + std::sqrt(p.gamma) * (m * r1);
}

qops::State2 equilibrium(const PhysParams& p) {
  const Superop g = feedback_liouvillian(p);
  const BlochDrift d = bloch_drift(g);

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(d.b);
  const double smin = svd.singularValues()(2);
  const double smax = svd.singularValues()(0);
  if (!(smin > 0.0) || smax / smin > 1e12)
    throw SingularDynamics("equilibrium: Bloch drift is numerically singular (non-unique or marginal equilibrium)");

  Eigen::Vector3d v = d.b.partialPivLu().solve(-d.k);
  // One refinement step keeps the generator residual at machine scale.
  v += d.b.partialPivLu().solve(-d.k - d.b * v);

  Eigen::Vector4d coords;
  coords << 1.0, v[0], v[1], v[2];
  const double residual = (g.matrix() * coords).cwiseAbs().maxCoeff();
  if (residual > 1e-12)
    throw SingularDynamics("equilibrium: stationarity residual above tolerance");
  try {
    return qops::State2::from_op(qops::coords_op(coords));
  } catch (const ValidationError& e) {
    throw SingularDynamics(std::string("equilibrium: solution violates state invariants: ") + e.what());
  }
}

Eigen::Matrix3d a_matrix(const PhysParams& p) {
  const double g = p.gamma;
  const double a1 = p.alpha1_abs;
  const double c = p.c;
  const double dwc = delta_omega_c(p);
  const double sphi = std::sin(p.phi);
  const double cphi = std::cos(p.phi);

  Eigen::Matrix3d a;
  a(0, 0) = g * (0.5 + p.n_bar + 2.0 * p.k_d + 2.0 * c * a1 * std::cos(p.theta1) * sphi +
                 2.0 * c * c * sphi * sphi);
  a(0, 1) = dwc - g * (c * a1 * std::cos(p.theta1 + p.phi) + c * c * std::sin(2.0 * p.phi));
  a(1, 0) = -dwc - g * (c * a1 * std::cos(p.theta1 + p.phi) + c * c * std::sin(2.0 * p.phi));
  a(1, 1) = g * (0.5 + p.n_bar + 2.0 * p.k_d - 2.0 * c * a1 * std::sin(p.theta1) * cphi +
                 2.0 * c * c * cphi * cphi);
  a(2, 2) = g * (1.0 + 2.0 * p.n_bar - 2.0 * c * a1 * std::sin(p.theta1 - p.phi) + 2.0 * c * c);
  a(0, 2) = 0.0;
  a(2, 0) = 0.0;
  a(1, 2) = p.omega_rabi;
  a(2, 1) = -p.omega_rabi;
  return a;
}

Eigen::Vector3d t_vector(const PhysParams& p) {
  const Op2 eta = equilibrium(p).op();
  const complex<double> phase = std::exp(kI * p.theta2);
  const double mean_quad = (qops::sigma_phi(p.theta2) * eta).trace().real();
  const Op2 x = phase * qops::sigma_minus() * eta + std::conj(phase) * eta * qops::sigma_plus() -
                mean_quad * eta;

  Eigen::Vector3d t;
  const Op2* paulis[3] = {&qops::sigma_x(), &qops::sigma_y(), &qops::sigma_z()};
  for (int k = 0; k < 3; ++k) {
    const complex<double> tr = (x * (*paulis[k])).trace();
    if (std::abs(tr.imag()) > 1e-12)
      throw SingularDynamics("t_vector: imaginary residue above tolerance");
    t[k] = tr.real();
  }
  return t;
}

BlochDrift bloch_drift(const Superop& g) {
  if (!g.trace_preserving_generator(1e-10))
    throw std::invalid_argument("bloch_drift: generator is not trace-preserving");
  BlochDrift d;
  d.b = g.matrix().block<3, 3>(1, 1);
  d.k = g.matrix().block<3, 1>(1, 0);
  return d;
}

const std::vector<std::string>& param_names() {
  static const std::vector<std::string> names = {
      "gamma", "omega_rabi", "delta_omega", "n_bar",  "k_d", "alpha1_sq",
      "alpha2_sq", "theta1", "theta2", "c", "phi"};
  return names;
}

bool is_angle_param(const std::string& name) {
  return name == "theta1" || name == "theta2" || name == "phi";
}

double get_param(const PhysParams& p, const std::string& name) {
  if (name == "gamma") return p.gamma;
  if (name == "omega_rabi") return p.omega_rabi;
  if (name == "delta_omega") return p.delta_omega;
  if (name == "n_bar") return p.n_bar;
  if (name == "k_d") return p.k_d;
  if (name == "alpha1_sq") return p.alpha1_sq();
  if (name == "alpha2_sq") return p.alpha2_sq();
  if (name == "theta1") return p.theta1;
  if (name == "theta2") return p.theta2;
  if (name == "c") return p.c;
  if (name == "phi") return p.phi;
  throw std::invalid_argument("unknown parameter: " + name);
}

void set_param(PhysParams& p, const std::string& name, double value) {
  if (name == "gamma") p.gamma = value;
  else if (name == "omega_rabi") p.omega_rabi = value;
  else if (name == "delta_omega") p.delta_omega = value;
  else if (name == "n_bar") p.n_bar = value;
  else if (name == "k_d") p.k_d = value;
  else if (name == "alpha1_sq") {
    if (value < 0.0) throw ValidationError("alpha1_sq must be >= 0");
    p.alpha1_abs = std::sqrt(value);
  } else if (name == "alpha2_sq") {
    if (value < 0.0) throw ValidationError("alpha2_sq must be >= 0");
    p.alpha2_abs = std::sqrt(value);
  } else if (name == "theta1") p.theta1 = value;
  else if (name == "theta2") p.theta2 = value;
  else if (name == "c") p.c = value;
  else if (name == "phi") p.phi = value;
  else throw std::invalid_argument("unknown parameter: " + name);
}

}  // namespace fluorospec::model

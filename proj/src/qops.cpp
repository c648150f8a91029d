#include "fluorospec/qops.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "fluorospec/errors.hpp"

namespace fluorospec::qops {

namespace {
const Complex kI(0.0, 1.0);

Op2 make(Complex a, Complex b, Complex c, Complex d) {
  Op2 m;
  m << a, b, c, d;
  return m;
}
}  // namespace

const Op2& identity2() {
  static const Op2 op = Op2::Identity();
  return op;
}
const Op2& sigma_x() {
  static const Op2 op = make(0, 1, 1, 0);
  return op;
}
const Op2& sigma_y() {
  static const Op2 op = make(0, -kI, kI, 0);
  return op;
}
const Op2& sigma_z() {
  static const Op2 op = make(1, 0, 0, -1);
  return op;
}
const Op2& sigma_plus() {
  static const Op2 op = make(0, 1, 0, 0);
  return op;
}
const Op2& sigma_minus() {
  static const Op2 op = make(0, 0, 1, 0);
  return op;
}
const Op2& proj_excited() {
  static const Op2 op = make(1, 0, 0, 0);
  return op;
}
const Op2& proj_ground() {
  static const Op2 op = make(0, 0, 0, 1);
  return op;
}

Op2 sigma_phi(double phi) {
  if (!std::isfinite(phi)) throw std::invalid_argument("sigma_phi: phi must be finite");
  return std::exp(kI * phi) * sigma_minus() + std::exp(-kI * phi) * sigma_plus();
}

bool is_hermitian(const Op2& a, double tol) {
  return (a - Op2(a.adjoint())).cwiseAbs().maxCoeff() <= tol;
}

Eigen::Vector4d op_coords(const Op2& a) {
  Eigen::Vector4d c;
  c[0] = a.trace().real();
  c[1] = (sigma_x() * a).trace().real();
  c[2] = (sigma_y() * a).trace().real();
  c[3] = (sigma_z() * a).trace().real();
  return c;
}

Op2 coords_op(const Eigen::Vector4d& c) {
  return 0.5 * (c[0] * identity2() + c[1] * sigma_x() + c[2] * sigma_y() + c[3] * sigma_z());
}

double BlochVec::norm() const { return std::sqrt(x * x + y * y + z * z); }

State2 State2::from_op(const Op2& rho, double eig_tol) {
  const double scale = std::max(rho.cwiseAbs().maxCoeff(), 1e-300);
  if ((rho - Op2(rho.adjoint())).cwiseAbs().maxCoeff() > 1e-12 * 2.0 * scale)
    throw ValidationError("State2: not Hermitian within tolerance");
  if (std::abs(rho.trace().real() - 1.0) > 1e-12 || std::abs(rho.trace().imag()) > 1e-12)
    throw ValidationError("State2: trace differs from 1 beyond tolerance");
  // Eigenvalues of a Hermitian 2x2 with unit trace: (1 +- |r|)/2.
  const Eigen::Vector4d c = op_coords(rho);
  const double r = std::sqrt(c[1] * c[1] + c[2] * c[2] + c[3] * c[3]);
  if ((1.0 - r) / 2.0 < -eig_tol)
    throw ValidationError("State2: negative eigenvalue " + std::to_string((1.0 - r) / 2.0));
  return State2(0.5 * (rho + Op2(rho.adjoint())));
}

State2 State2::ground() { return State2(proj_ground()); }
State2 State2::excited() { return State2(proj_excited()); }
State2 State2::maximally_mixed() { return State2(0.5 * identity2()); }

BlochVec State2::bloch() const {
  const Eigen::Vector4d c = op_coords(rho_);
  return BlochVec{c[1], c[2], c[3]};
}

Superop Superop::identity_map() { return Superop(Eigen::Matrix4d::Identity()); }

Superop Superop::from_op_map(const std::function<Op2(const Op2&)>& f) {
  static const Op2* basis[4] = {&identity2(), &sigma_x(), &sigma_y(), &sigma_z()};
  Eigen::Matrix4d m;
  for (int k = 0; k < 4; ++k) {
    const Op2 out = f(*basis[k]);
    const double scale = std::max(out.cwiseAbs().maxCoeff(), 1.0);
    if ((out - Op2(out.adjoint())).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw std::invalid_argument("Superop::from_op_map: map does not preserve Hermiticity");
    m.col(k) = 0.5 * op_coords(out);
  }
  return Superop(m);
}

Op2 Superop::operator()(const Op2& a) const { return coords_op(m_ * op_coords(a)); }

bool Superop::trace_preserving_generator(double tol) const {
  return m_.row(0).cwiseAbs().maxCoeff() <= tol;
}

Superop rmap(const Op2& a) {
  return Superop::from_op_map([&a](const Op2& rho) { return Op2(a * rho + rho * a.adjoint()); });
}

Superop commutator_map(const Op2& h) {
  const double scale = std::max(h.cwiseAbs().maxCoeff(), 1.0);
  if ((h - Op2(h.adjoint())).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("commutator_map: h must be Hermitian");
  return Superop::from_op_map(
      [&h](const Op2& rho) { return Op2(-kI * (h * rho - rho * h)); });
}

Superop dissipator(const Op2& a) {
  const Op2 ada = a.adjoint() * a;
  return Superop::from_op_map([&](const Op2& rho) {
    return Op2(a * rho * a.adjoint() - 0.5 * (ada * rho + rho * ada));
  });
}

Superop sandwich_map(const Op2& a) {
  return Superop::from_op_map([&a](const Op2& rho) { return Op2(a * rho * a.adjoint()); });
}

Superop anticommutator_map(const Op2& h) {
  const double scale = std::max(h.cwiseAbs().maxCoeff(), 1.0);
  if ((h - Op2(h.adjoint())).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("anticommutator_map: h must be Hermitian");
  return Superop::from_op_map([&h](const Op2& rho) { return Op2(h * rho + rho * h); });
}

Superop expm(const Superop& g, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("expm: t must be >= 0");
  const Eigen::Matrix4d scaled = t * g.matrix();
  return Superop(scaled.exp());
}

BlochVec to_bloch(const State2& s) { return s.bloch(); }

State2 from_bloch(const BlochVec& b) {
  const double n = b.norm();
  if (n > 1.0 + 1e-9) throw ValidationError("from_bloch: |b| exceeds 1 beyond tolerance");
  Eigen::Vector4d c;
  c << 1.0, b.x, b.y, b.z;
  return State2::from_op(coords_op(c));
}

}  // namespace fluorospec::qops

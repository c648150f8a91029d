#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace fluorospec::qops {

using Complex = std::complex<double>;

/// A (not necessarily Hermitian) operator on the atom's two-dimensional state space.
using Op2 = Eigen::Matrix2cd;

// Fixed operator set. Conventions: P_plus = |e><e| projects on the excited state
// (sigma_z eigenvalue +1), P_minus = |g><g| on the ground state, and
// sigma_minus = |g><e| lowers, so sigma_plus * sigma_minus = P_plus.
const Op2& identity2();
const Op2& sigma_x();
const Op2& sigma_y();
const Op2& sigma_z();
const Op2& sigma_plus();
const Op2& sigma_minus();
const Op2& proj_excited();
const Op2& proj_ground();

/// exp(i phi) sigma_- + exp(-i phi) sigma_+ = cos(phi) sigma_x + sin(phi) sigma_y.
/// Hermitian and unitary for every real phi; sigma_phi(phi + pi) = -sigma_phi(phi).
Op2 sigma_phi(double phi);

bool is_hermitian(const Op2& a, double tol = 1e-12);

// Coordinates (w, x, y, z) of a Hermitian operator in the basis
// {I, sigma_x, sigma_y, sigma_z}, normalized so that
//   a = (w I + x sigma_x + y sigma_y + z sigma_z) / 2,
// i.e. w = Tr a, x = Tr(sigma_x a), and so on. States have w = 1.
Eigen::Vector4d op_coords(const Op2& a);
Op2 coords_op(const Eigen::Vector4d& c);

/// Bloch vector (<sigma_x>, <sigma_y>, <sigma_z>); |b| <= 1 for valid states.
struct BlochVec {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double norm() const;
};

/// Density matrix: Hermitian, unit trace, positive semidefinite (to tolerance).
class State2 {
 public:
  /// Validates: hermiticity to 1e-12 relative to the spectral norm, unit trace
  /// to 1e-12, both eigenvalues >= -eig_tol. Throws ValidationError otherwise.
  /// Discretized trajectory paths pass a relaxed eig_tol (1e-6).
  static State2 from_op(const Op2& rho, double eig_tol = 1e-9);
  static State2 ground();
  static State2 excited();
  static State2 maximally_mixed();

  const Op2& op() const { return rho_; }
  BlochVec bloch() const;
  Eigen::Vector4d coords() const { return op_coords(rho_); }

 private:
  explicit State2(Op2 rho) : rho_(std::move(rho)) {}
  Op2 rho_;
};

/// Linear map on operators, stored as a 4x4 real matrix acting on the
/// coordinate vector (w, x, y, z). Exact for Hermiticity-preserving maps,
/// which covers every map used here; hermiticity of outputs is then
/// guaranteed by construction.
class Superop {
 public:
  Superop() : m_(Eigen::Matrix4d::Zero()) {}
  explicit Superop(const Eigen::Matrix4d& m) : m_(m) {}
  static Superop identity_map();

  /// Builds the matrix from the action of `f` on the basis {I, sx, sy, sz}.
  /// Throws std::invalid_argument if `f` does not preserve Hermiticity.
  static Superop from_op_map(const std::function<Op2(const Op2&)>& f);

  Op2 operator()(const Op2& a) const;
  Eigen::Vector4d operator()(const Eigen::Vector4d& coords) const { return m_ * coords; }

  const Eigen::Matrix4d& matrix() const { return m_; }

  /// A generator produces a trace-preserving semigroup iff its first row
  /// vanishes; checked to `tol` on the max |entry| of that row.
  bool trace_preserving_generator(double tol = 1e-12) const;

  friend Superop operator*(const Superop& f, const Superop& g) { return Superop(f.m_ * g.m_); }
  friend Superop operator+(const Superop& f, const Superop& g) { return Superop(f.m_ + g.m_); }
  friend Superop operator-(const Superop& f, const Superop& g) { return Superop(f.m_ - g.m_); }
  friend Superop operator*(double s, const Superop& g) { return Superop(s * g.m_); }

 private:
  Eigen::Matrix4d m_;
};

/// rho -> a rho + rho a^dag  (additive in a; real-linear through a rho + rho a^dag).
Superop rmap(const Op2& a);

/// rho -> -i [h, rho]; requires h Hermitian to 1e-12 (throws std::invalid_argument).
Superop commutator_map(const Op2& h);

/// rho -> a rho a^dag - (a^dag a rho + rho a^dag a) / 2.
Superop dissipator(const Op2& a);

/// rho -> a rho a^dag.
Superop sandwich_map(const Op2& a);

/// rho -> {h, rho} = h rho + rho h; requires h Hermitian.
Superop anticommutator_map(const Op2& h);

/// exp(t g), t >= 0, via scaling-and-squaring Pade on the 4x4 real matrix.
Superop expm(const Superop& g, double t);

BlochVec to_bloch(const State2& s);

/// Rejects |b| > 1 + 1e-9 with ValidationError.
State2 from_bloch(const BlochVec& b);

}  // namespace fluorospec::qops

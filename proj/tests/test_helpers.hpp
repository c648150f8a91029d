#pragma once

#include <cmath>
#include <random>

#include "fluorospec/model.hpp"

namespace test_helpers {

constexpr double kPi = 3.14159265358979323846;

inline double uni(std::mt19937_64& eng, double lo, double hi) {
  const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

// Draw ranges used by all property sweeps: gamma in [0.5, 2], Omega in [0, 3],
// dw in [-3, 3], nbar in [0, 1], kd in [0, 0.5], |a1|^2 + |a2|^2 <= 1,
// c in [-1, 1], phi in [0, pi), theta in [-pi, pi].
inline fluorospec::model::PhysParams random_params(std::mt19937_64& eng) {
  fluorospec::model::PhysParams p;
  p.gamma = uni(eng, 0.5, 2.0);
  p.omega_rabi = uni(eng, 0.0, 3.0);
  p.delta_omega = uni(eng, -3.0, 3.0);
  p.n_bar = uni(eng, 0.0, 1.0);
  p.k_d = uni(eng, 0.0, 0.5);
  double a1sq, a2sq;
  do {
    a1sq = uni(eng, 0.0, 1.0);
    a2sq = uni(eng, 0.0, 1.0);
  } while (a1sq + a2sq > 1.0);
  p.alpha1_abs = std::sqrt(a1sq);
  p.alpha2_abs = std::sqrt(a2sq);
  p.c = uni(eng, -1.0, 1.0);
  p.phi = uni(eng, 0.0, kPi);
  p.theta1 = uni(eng, -kPi, kPi);
  p.theta2 = uni(eng, -kPi, kPi);
  return p;
}

inline fluorospec::qops::State2 random_state(std::mt19937_64& eng) {
  // Uniform direction, radius biased toward the boundary but strictly inside.
  double x, y, z, r2;
  do {
    x = uni(eng, -1.0, 1.0);
    y = uni(eng, -1.0, 1.0);
    z = uni(eng, -1.0, 1.0);
    r2 = x * x + y * y + z * z;
  } while (r2 > 1.0);
  return fluorospec::qops::from_bloch({x, y, z});
}

// Random Hermitian operator with entries of order 1.
inline fluorospec::qops::Op2 random_hermitian(std::mt19937_64& eng) {
  using fluorospec::qops::Op2;
  const std::complex<double> offd(uni(eng, -1.0, 1.0), uni(eng, -1.0, 1.0));
  Op2 h;
  h << uni(eng, -1.0, 1.0), offd, std::conj(offd), uni(eng, -1.0, 1.0);
  return h;
}

inline fluorospec::qops::Op2 random_op(std::mt19937_64& eng) {
  fluorospec::qops::Op2 a;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      a(i, j) = std::complex<double>(uni(eng, -1.0, 1.0), uni(eng, -1.0, 1.0));
  return a;
}

}  // namespace test_helpers

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fluorospec/config.hpp"
#include "fluorospec/errors.hpp"
#include "fluorospec/spectrum.hpp"
#include "test_helpers.hpp"

using namespace fluorospec;
using test_helpers::kPi;

namespace {

model::PhysParams preset_params(const std::string& name) { return cli::preset(name).params; }

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

// Paper closed forms on the line-narrowing parameter line.
double lorentzian_nofeedback(double mu, double gamma, double omega, double a2sq) {
  return 1.0 + 2.0 * a2sq * omega * omega / (gamma * gamma + 2.0 * omega * omega) * gamma * gamma /
                   (mu * mu + gamma * gamma / 4.0);
}

double lorentzian_feedback(double mu, double gamma, double omega, double a1sq, double a2sq) {
  const double g2 = gamma * gamma;
  const double num = a2sq * (a1sq / 2.0 * g2 + 2.0 * omega * omega);
  const double den = (1.0 - a1sq / 2.0) * g2 + 2.0 * omega * omega;
  const double w = (1.0 - a1sq) * gamma;
  return 1.0 + num / den * w * gamma / (mu * mu + w * w / 4.0);
}

}  // namespace

TEST_CASE("white-noise channel: s_inel is exactly 1") {
  model::PhysParams p = preset_params("fig3_nofeedback");
  p.alpha2_abs = 0.0;
  for (double mu : {0.0, 0.3, 2.0, 50.0}) CHECK(spectrum::s_inel(p, mu) == 1.0);
  const auto res = spectrum::s_inel_grid(p, linspace(-4, 4, 101));
  for (double v : res.s_inel) CHECK(std::abs(v - 1.0) <= 1e-12);
  CHECK(res.elastic_mean == 0.0);
}

TEST_CASE("no-feedback line-narrowing parameters: closed form matches the Lorentzian") {
  const model::PhysParams p = preset_params("fig3_nofeedback");
  CHECK(spectrum::s_inel(p, 0.0) == doctest::Approx(2.6).epsilon(1e-10));
  for (double mu : {0.0, 0.25, -0.25, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0})
    CHECK(std::abs(spectrum::s_inel(p, mu) - lorentzian_nofeedback(mu, 1.0, 2.0, 0.45)) < 1e-10);
}

TEST_CASE("feedback line-narrowing parameters: closed form matches the Lorentzian") {
  const model::PhysParams p = preset_params("fig3_feedback");
  CHECK(spectrum::s_inel(p, 0.0) == doctest::Approx(4.0675990676).epsilon(1e-8));
  for (double mu : {0.0, 0.25, -0.25, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0})
    CHECK(std::abs(spectrum::s_inel(p, mu) - lorentzian_feedback(mu, 1.0, 2.0, 0.45, 0.45)) < 1e-10);
}

TEST_CASE("grid evaluation: even spectrum and peak at zero on the Fig. 3 line") {
  const model::PhysParams p = preset_params("fig3_nofeedback");
  const auto grid = linspace(-4, 4, 801);
  const auto res = spectrum::s_inel_grid(p, grid);
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < res.s_inel.size(); ++i)
    if (res.s_inel[i] > res.s_inel[argmax]) argmax = i;
  CHECK(std::abs(grid[argmax]) < 1e-12);
  for (int i = 0; i < 400; ++i)
    CHECK(std::abs(res.s_inel[i] - res.s_inel[800 - i]) < 1e-10);
}

TEST_CASE("spectrum tends to the shot-noise floor at large mu") {
  std::mt19937_64 eng(61);
  for (int i = 0; i < 25; ++i) {
    const model::PhysParams p = test_helpers::random_params(eng);
    CHECK(std::abs(spectrum::s_inel(p, 1e3 * p.gamma) - 1.0) < 1e-4);
  }
}

TEST_CASE("elastic line") {
  model::PhysParams p;  // undriven: eta = P-, no coherence
  auto [m0, w0] = spectrum::elastic_line(p);
  CHECK(m0 == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(w0 == doctest::Approx(0.0).epsilon(1e-13));

  model::PhysParams white = preset_params("fig3_nofeedback");
  white.alpha2_abs = 0.0;
  CHECK(spectrum::elastic_line(white).first == 0.0);

  // m = sqrt(gamma) |a2| <sigma_theta2>_eq against the quadrature mean of the
  // propagated state at large T (mean-current quadrature oracle).
  const model::PhysParams f1 = preset_params("fig1_case1");
  const auto [m, weight] = spectrum::elastic_line(f1);
  const Eigen::Vector4d late =
      qops::expm(model::feedback_liouvillian(f1), 200.0)(qops::State2::ground().coords());
  const double quad = std::cos(f1.theta2) * late[1] + std::sin(f1.theta2) * late[2];
  CHECK(m == doctest::Approx(std::sqrt(f1.gamma) * f1.alpha2_abs * quad).epsilon(1e-9));
  CHECK(weight == doctest::Approx(2.0 * kPi * m * m));
  CHECK(std::abs(m) > 1e-3);  // this set does carry an elastic line
}

TEST_CASE("autocorrelation: zero channel, symmetry, stationarity") {
  std::mt19937_64 eng(67);
  model::PhysParams zero = test_helpers::random_params(eng);
  zero.alpha2_abs = 0.0;
  CHECK(spectrum::autocorrelation(zero, qops::State2::ground(), 1.3, 0.4) == 0.0);

  const model::PhysParams p = preset_params("fig3_feedback");
  const qops::State2 rho0 = qops::from_bloch({0.3, -0.2, 0.1});
  for (int i = 0; i < 10; ++i) {
    const double t = test_helpers::uni(eng, 0.0, 6.0);
    const double s = test_helpers::uni(eng, 0.0, 6.0);
    CHECK(spectrum::autocorrelation(p, rho0, t, s) ==
          doctest::Approx(spectrum::autocorrelation(p, rho0, s, t)).epsilon(1e-12));
  }

  // From the equilibrium initial state the value depends on |t - s| only.
  const qops::State2 eta = model::equilibrium(p);
  for (int i = 0; i < 10; ++i) {
    const double lag = test_helpers::uni(eng, 0.0, 4.0);
    const double base = test_helpers::uni(eng, 0.0, 5.0);
    const double shift = test_helpers::uni(eng, 0.0, 5.0);
    const double v1 = spectrum::autocorrelation(p, eta, base + lag, base);
    const double v2 = spectrum::autocorrelation(p, eta, base + shift + lag, base + shift);
    CHECK(v1 == doctest::Approx(v2).epsilon(1e-10));
  }
}

TEST_CASE("stationary autocovariance: decay and lag-0 value") {
  const model::PhysParams p = preset_params("fig3_nofeedback");
  CHECK(std::abs(spectrum::stationary_autocovariance(p, 50.0)) <= 1e-8);

  model::PhysParams zero = p;
  zero.alpha2_abs = 0.0;
  CHECK(spectrum::stationary_autocovariance(zero, 1.0) == 0.0);

  // C(0) = gamma Tr{R R eta} - m^2 with e^0 = Id.
  const auto [m, w] = spectrum::elastic_line(p);
  const Eigen::Matrix4d r2 = qops::rmap(p.alpha2() * qops::sigma_minus()).matrix();
  const Eigen::Vector4d eta = model::equilibrium(p).coords();
  const double direct = p.gamma * (r2 * (r2 * eta))[0] - m * m;
  CHECK(spectrum::stationary_autocovariance(p, 0.0) == doctest::Approx(direct).epsilon(1e-12));

  // Consistency with the two-time function at equilibrium.
  const double lag = 0.7;
  CHECK(spectrum::stationary_autocovariance(p, lag) + m * m ==
        doctest::Approx(spectrum::autocorrelation(p, model::equilibrium(p), lag, 0.0))
            .epsilon(1e-10));
}

TEST_CASE("Fourier route equals the closed form (central equivalence)") {
  const model::PhysParams nf = preset_params("fig3_nofeedback");
  CHECK(spectrum::s_inel_via_autocorr(nf, 0.0) == doctest::Approx(2.6).epsilon(1e-6));

  model::PhysParams white = nf;
  white.alpha2_abs = 0.0;
  CHECK(spectrum::s_inel_via_autocorr(white, 0.7) == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 eng(71);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const model::PhysParams p = test_helpers::random_params(eng);
    for (double mu : {0.0, 0.5, 2.0}) {
      const double closed = spectrum::s_inel(p, mu);
      const double fourier = spectrum::s_inel_via_autocorr(p, mu);
      worst = std::max(worst, std::abs(closed - fourier));
    }
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("positivity of the inelastic spectrum on sweeps") {
  std::mt19937_64 eng(73);
  for (int i = 0; i < 50; ++i) {
    const model::PhysParams p = test_helpers::random_params(eng);
    for (int k = 0; k <= 20; ++k) CHECK(spectrum::s_inel(p, -5.0 + 0.5 * k) > 0.0);
  }
}

TEST_CASE("Heisenberg product bound") {
  model::PhysParams white = preset_params("fig3_nofeedback");
  white.alpha2_abs = 0.0;
  CHECK(spectrum::heisenberg_product(white, 0.4) == 1.0);

  const model::PhysParams f1 = preset_params("fig1_case1");
  const double prod = spectrum::heisenberg_product(f1, 0.0);
  CHECK(prod >= 1.0 - 1e-9);
  CHECK(spectrum::s_inel(f1, 0.0) < 1.0);  // squeezed factor

  std::mt19937_64 eng(79);
  double worst = 2.0;
  for (int i = 0; i < 100; ++i) {
    const model::PhysParams p = test_helpers::random_params(eng);
    for (int k = 0; k <= 16; ++k)
      worst = std::min(worst, spectrum::heisenberg_product(p, -4.0 + 0.5 * k));
  }
  CHECK(worst >= 1.0 - 1e-9);
}

TEST_CASE("squeezing reports for the figure presets") {
  const auto grid = linspace(-4, 4, 801);

  const auto rep1 = spectrum::squeezing_report(preset_params("fig1_case1"), grid);
  CHECK(rep1.squeezed);
  CHECK(std::abs(rep1.argmin_mu) <= 0.1);

  const auto rep2 = spectrum::squeezing_report(preset_params("fig1_case2"), grid);
  CHECK(rep2.squeezed);
  CHECK(std::abs(std::abs(rep2.argmin_mu) - 2.5) <= 0.2);

  const auto rep3 = spectrum::squeezing_report(preset_params("fig1_case3"), grid);
  CHECK(rep3.squeezed);
  CHECK(std::abs(rep3.argmin_mu) <= 0.1);
  CHECK(rep3.min_value < rep1.min_value);  // feedback enhances the squeezing

  const auto rep4 = spectrum::squeezing_report(preset_params("fig1_case4"), grid);
  CHECK(rep4.squeezed);
  CHECK(std::abs(std::abs(rep4.argmin_mu) - 2.5) <= 0.2);

  // Conjugate quadratures show peaks where the squeezed ones show dips.
  for (int k = 1; k <= 4; ++k) {
    const auto rep =
        spectrum::squeezing_report(preset_params("fig1_case" + std::to_string(k)), grid);
    const model::PhysParams conj = preset_params("fig2_case" + std::to_string(k));
    CHECK(spectrum::s_inel(conj, rep.argmin_mu) > 1.0);
  }

  model::PhysParams dark;  // undriven atom: nothing to squeeze
  dark.alpha1_abs = dark.alpha2_abs = std::sqrt(0.45);
  CHECK(!spectrum::squeezing_report(dark, grid).squeezed);
}

TEST_CASE("fwhm on the line-narrowing pair and failure modes") {
  CHECK(spectrum::fwhm(preset_params("fig3_nofeedback")) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(spectrum::fwhm(preset_params("fig3_feedback")) == doctest::Approx(0.55).epsilon(1e-6));
  CHECK_THROWS_AS(spectrum::fwhm(preset_params("fig1_case2")), NotUnimodal);
  CHECK_THROWS_AS(spectrum::fwhm(preset_params("fig1_case1")), NotUnimodal);  // dip at 0
}

TEST_CASE("fault injection: a corrupted A breaks the equivalence") {
  const model::PhysParams p = preset_params("fig3_feedback");
  Eigen::Matrix3d a = model::a_matrix(p);
  a(0, 0) += 0.1;
  const double corrupted =
      spectrum::s_inel_from_parts(a, model::t_vector(p), p.theta2, p.gamma, p.alpha2_sq(), 0.0);
  CHECK(std::abs(corrupted - spectrum::s_inel_via_autocorr(p, 0.0)) > 1e-3);
}

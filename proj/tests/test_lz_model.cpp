#include <doctest.h>

#include <cmath>

#include "lzmeas/dynamics.hpp"
#include "lzmeas/lz_model.hpp"
#include "support.hpp"

using namespace lzmeas;

TEST_SUITE("lz_model") {

TEST_CASE("adiabatic energies match numerical eigenvalues") {
  for (double z : {0.05, 0.5, 5.0})
    for (double t = -50.0; t <= 50.0; t += 2.5) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(test::to_eigen(hamiltonian_diabatic(t, z)));
      const auto e = adiabatic_energies(t, z);
      CHECK(e.lower == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-12));
      CHECK(e.upper == doctest::Approx(es.eigenvalues()(1)).epsilon(1e-12));
    }
  const auto at_zero = adiabatic_energies(0.0, 0.5);
  CHECK(at_zero.upper - at_zero.lower == doctest::Approx(1.0));
}

TEST_CASE("mixing angle is continuous on (0, pi)") {
  CHECK(mixing_angle(0.0).theta == doctest::Approx(M_PI / 2));
  CHECK(mixing_angle(1e6).theta < 1e-5);
  CHECK(mixing_angle(-1e6).theta > M_PI - 1e-5);
  double prev = mixing_angle(-100.0).theta;
  for (double t = -99.9; t <= 100.0; t += 0.1) {
    const double th = mixing_angle(t).theta;
    CHECK(th < prev);
    CHECK(std::abs(th - prev) <= 0.1 * (1 + 1e-9));  // |dtheta/dt| <= 1
    prev = th;
  }
}

TEST_CASE("transform diagonalizes the Hamiltonian with the upper level first") {
  for (double t : {-30.0, -1.0, 0.0, 0.3, 7.0}) {
    const Mat2 u = transform_u(t);
    const Mat2 d = u * hamiltonian_diabatic(t, 0.7) * u.transpose();
    const auto e = adiabatic_energies(t, 0.7);
    CHECK(std::abs(d(0, 1)) < 1e-14);
    CHECK(d(0, 0).real() == doctest::Approx(e.upper));
    CHECK(d(1, 1).real() == doctest::Approx(e.lower));
    CHECK((u * u.transpose() - Mat2::identity()).max_abs() < 1e-15);
  }
}

TEST_CASE("gauge term matches a finite-difference derivative") {
  for (double t : {-20.0, -2.0, -0.5, 0.0, 0.5, 3.0}) {
    const double h = 1e-5;
    const Mat2 dinv = (transform_u(t + h).transpose() - transform_u(t - h).transpose()) * (0.5 / h);
    const Mat2 fd = transform_u(t) * dinv;
    CHECK((gauge_term_m(t) - fd).max_abs() < 1e-9);
  }
  CHECK(gauge_term_m(0.0)(0, 1).real() == doctest::Approx(0.5));
}

// Transform an exact diabatic trajectory into the adiabatic frame and
// differentiate it numerically; only one gauge orientation reproduces it.
TEST_CASE("adiabatic equation of motion follows from the frame change") {
  const LzParams params{0.8, 0.0};
  std::mt19937_64 rng(5);
  for (double t : {-3.0, -0.4, 0.0, 1.2}) {
    const DensityMatrix rho = test::random_state(rng, Basis::diabatic);
    const double h = 1e-5;
    auto evolve = [&](double dt) {
      const Mat2 drho = rhs_diabatic(rho, t, params);
      return DensityMatrix{rho.matrix() + dt * drho, Basis::diabatic};
    };
    const Mat2 plus = to_adiabatic(evolve(h), t + h).matrix();
    const Mat2 minus = to_adiabatic(evolve(-h), t - h).matrix();
    const Mat2 fd = (plus - minus) * (0.5 / h);
    const DensityMatrix adi = to_adiabatic(rho, t);
    CHECK((rhs_adiabatic(adi, t, params, GaugeSign::standard) - fd).max_abs() < 1e-8);
    CHECK((rhs_adiabatic(adi, t, params, GaugeSign::inverted) - fd).max_abs() > 1e-3);
  }
}

TEST_CASE("basis transforms round trip") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const double t = -50.0 + i;
    const DensityMatrix rho = test::random_state(rng, Basis::diabatic);
    const DensityMatrix adi = to_adiabatic(rho, t);
    CHECK(adi.basis() == Basis::adiabatic);
    CHECK((to_diabatic(adi, t).matrix() - rho.matrix()).max_abs() < 1e-14);
    CHECK(purity(adi) == doctest::Approx(purity(rho)));
  }
  CHECK_THROWS_AS(to_adiabatic(DensityMatrix::diag(1, 0, Basis::adiabatic), 0.0), BasisMismatch);
  CHECK_THROWS_AS(to_diabatic(DensityMatrix::diag(1, 0, Basis::diabatic), 0.0), BasisMismatch);
}

TEST_CASE("diabatic level one is the ground state long before the crossing") {
  const auto adi = to_adiabatic(DensityMatrix::diag(1.0, 0.0, Basis::diabatic), -1e4);
  CHECK(adi.p2() == doctest::Approx(1.0).epsilon(1e-8));
  const auto late = to_adiabatic(DensityMatrix::diag(1.0, 0.0, Basis::diabatic), 1e4);
  CHECK(late.p1() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("closed-form limits") {
  CHECK(lz_survival_probability(0.5) == doctest::Approx(std::exp(-M_PI / 2)));
  CHECK(lz_survival_probability(0.5) == doctest::Approx(0.208).epsilon(0.01));
  CHECK(zeno_projective_survival(1.0, 1.0, 100) == doctest::Approx(0.5 * (1.0 + std::exp(-0.02))));
  double prev = 0.0;
  for (int n : {1, 10, 100, 1000}) {
    const double p = zeno_projective_survival(1.0, 1.0, n);
    CHECK(p > prev);
    prev = p;
  }
  CHECK(strong_measurement_rate(0.5, 10.0, 0.0) == doctest::Approx(0.025));
  CHECK(strong_measurement_rate(0.5, 10.0, 10.0) < strong_measurement_rate(0.5, 10.0, 0.0));
  CHECK(freeze_estimate(1.0) == doctest::Approx(std::exp(-1.0)));
  const cplx c = approx_coherence(0.4, 0.0, 0.5, 2.0);
  CHECK(c.real() == doctest::Approx(0.0));
  CHECK(c.imag() == doctest::Approx(-0.05));
  CHECK_THROWS_AS(approx_coherence(0.4, 0.0, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW((LzParams{0.5, 0.0}.validate()));
  CHECK_THROWS_AS((LzParams{0.0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((LzParams{0.5, -1.0}.validate()), std::invalid_argument);
  CHECK(gauge_coefficient(GaugeSign::standard) == -gauge_coefficient(GaugeSign::inverted));
}

}

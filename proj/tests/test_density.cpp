#include <doctest.h>

#include "lzmeas/density.hpp"
#include "support.hpp"

using namespace lzmeas;

TEST_SUITE("density") {

TEST_CASE("bloch round trip and purity") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const DensityMatrix rho = test::random_state(rng, Basis::diabatic);
    const BlochVector r = rho.bloch();
    const DensityMatrix back = DensityMatrix::from_bloch(r, Basis::diabatic);
    CHECK((back.matrix() - rho.matrix()).max_abs() < 1e-15);
    const double r2 = r.x * r.x + r.y * r.y + r.w * r.w;
    CHECK(purity(rho) == doctest::Approx(0.5 * (1.0 + r2)).epsilon(1e-14));
    CHECK(validate_density(rho).valid());
  }
}

TEST_CASE("min eigenvalue matches a general eigensolver") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const Mat2 h = test::random_hermitian(rng);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(test::to_eigen(h));
    CHECK(min_eigenvalue(h) == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-12));
  }
}

TEST_CASE("validation flags each violation") {
  CHECK(validate_density(DensityMatrix::diag(1.0, 0.0, Basis::diabatic)).valid());
  const auto trace = validate_density(DensityMatrix::diag(0.6, 0.6, Basis::diabatic));
  CHECK_FALSE(trace.valid());
  CHECK(trace.trace_error == doctest::Approx(0.2));
  const auto negative = validate_density(DensityMatrix::diag(1.1, -0.1, Basis::diabatic));
  CHECK_FALSE(negative.valid());
  CHECK(negative.min_eigenvalue == doctest::Approx(-0.1));
  const auto nonherm = validate_density({Mat2{0.5, 0.1, 0.0, 0.5}, Basis::diabatic});
  CHECK_FALSE(nonherm.valid());
  CHECK(nonherm.hermiticity_error == doctest::Approx(0.1));
}

TEST_CASE("hermitize and renormalize") {
  DensityMatrix rho{Mat2{cplx{0.8, 1e-9}, cplx{0.1, 0.2}, 0.0, 0.4}, Basis::adiabatic};
  rho.hermitize();
  CHECK(hermiticity_error(rho.matrix()) == 0.0);
  CHECK(rho(1, 0) == cplx{0.05, -0.1});
  CHECK(rho.renormalize() == doctest::Approx(0.2));
  CHECK(rho.p1() + rho.p2() == doctest::Approx(1.0));
  CHECK(rho.basis() == Basis::adiabatic);
}

TEST_CASE("basis tags are enforced") {
  const auto rho = DensityMatrix::maximally_mixed(Basis::adiabatic);
  CHECK_NOTHROW(require_basis(rho, Basis::adiabatic, "here"));
  CHECK_THROWS_AS(require_basis(rho, Basis::diabatic, "here"), BasisMismatch);
  CHECK(std::string(to_string(Basis::diabatic)) == "diabatic");
}

}

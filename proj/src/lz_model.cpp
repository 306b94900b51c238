#include "lzmeas/lz_model.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace lzmeas {

namespace {

void require_positive_z(double z, const char* where) {
  if (!(z > 0.0)) throw std::invalid_argument(fmt::format("{}: z must be > 0 (got {})", where, z));
}

}  // namespace

void LzParams::validate() const {
  require_positive_z(z, "LzParams");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument(fmt::format("LzParams: lambda must be >= 0 (got {})", lambda));
}

Mat2 hamiltonian_diabatic(double t, double z) {
  require_positive_z(z, "hamiltonian_diabatic");
  return Mat2{z * t, z, z, -z * t};
}

AdiabaticEnergies adiabatic_energies(double t, double z) {
  require_positive_z(z, "adiabatic_energies");
  const double e = z * std::hypot(t, 1.0);
  return {e, -e};
}

MixingAngle mixing_angle(double t) { return {std::atan2(1.0, t)}; }

Mat2 transform_u(double t) {
  const double half = 0.5 * mixing_angle(t).theta;
  const double c = std::cos(half);
  const double s = std::sin(half);
  return Mat2{c, s, -s, c};
}

Mat2 gauge_term_m(double t) {
  const double m = 0.5 / (1.0 + t * t);
  return Mat2{0.0, m, -m, 0.0};
}

double gauge_coefficient(GaugeSign sign) { return sign == GaugeSign::standard ? -1.0 : 1.0; }

DensityMatrix to_adiabatic(const DensityMatrix& rho, double t) {
  require_basis(rho, Basis::diabatic, "to_adiabatic");
  const Mat2 u = transform_u(t);
  return {u * rho.matrix() * u.transpose(), Basis::adiabatic};
}

DensityMatrix to_diabatic(const DensityMatrix& rho, double t) {
  require_basis(rho, Basis::adiabatic, "to_diabatic");
  const Mat2 u = transform_u(t);
  return {u.transpose() * rho.matrix() * u, Basis::diabatic};
}

double lz_survival_probability(double z) {
  require_positive_z(z, "lz_survival_probability");
  return std::exp(-M_PI * z);
}

double zeno_projective_survival(double coupling, double total_time, int n_measurements) {
  if (n_measurements < 1) throw std::invalid_argument("zeno_projective_survival: N must be >= 1");
  if (!(total_time >= 0.0)) throw std::invalid_argument("zeno_projective_survival: T must be >= 0");
  const double vt = coupling * total_time;
  return 0.5 * (1.0 + std::exp(-2.0 * vt * vt / n_measurements));
}

double strong_measurement_rate(double z, double lambda, double t) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("strong_measurement_rate: lambda must be > 0 (strong-measurement limit)");
  const double a = 2.0 * lambda;
  const double b = 2.0 * z * t;
  return 4.0 * z * z * lambda / (a * a + b * b);
}

cplx approx_coherence(double delta_rho, double t, double z, double lambda) {
  const cplx denom{2.0 * lambda, 2.0 * z * t};
  if (denom == cplx{0.0, 0.0})
    throw std::invalid_argument("approx_coherence: lambda and t cannot both vanish");
  return cplx{0.0, -z * delta_rho} / denom;
}

double freeze_estimate(double z) {
  require_positive_z(z, "freeze_estimate");
  return std::exp(-z);
}

}  // namespace lzmeas

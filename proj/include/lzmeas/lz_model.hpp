#pragma once

#include "lzmeas/density.hpp"
#include "lzmeas/matrix2.hpp"

// Landau-Zener model in dimensionless units: time t (in units of V/u), sweep
// parameter z = V^2/u and measurement strength lambda (in units of u/V).
namespace lzmeas {

struct LzParams {
  double z = 0.5;
  double lambda = 0.0;

  // Throws std::invalid_argument unless z > 0 and lambda >= 0.
  void validate() const;
};

struct MixingAngle {
  double theta;  // radians, in (0, pi)
};

// z * [[t, 1], [1, -t]]
Mat2 hamiltonian_diabatic(double t, double z);

struct AdiabaticEnergies {
  double upper;
  double lower;
};

// (+z sqrt(t^2+1), -z sqrt(t^2+1))
AdiabaticEnergies adiabatic_energies(double t, double z);

// tan(theta) = 1/t on the continuous (0, pi) branch; theta(0) = pi/2.
MixingAngle mixing_angle(double t);

// Real rotation U(t) = [[cos(theta/2), sin(theta/2)], [-sin(theta/2), cos(theta/2)]].
// U H U^T is diagonal with the upper energy first.
Mat2 transform_u(double t);

// Gauge generator M = U dU^{-1}/dt = (1 / (2 (1 + t^2))) [[0, 1], [-1, 0]].
Mat2 gauge_term_m(double t);

// Orientation of the gauge commutator in the adiabatic-frame equation of
// motion. `standard` is the orientation fixed by basis consistency; `inverted`
// exists only so the consistency check can be shown to catch a sign error.
enum class GaugeSign { standard, inverted };

// Coefficient multiplying [M, rho] in d(rho_adi)/dt.
double gauge_coefficient(GaugeSign sign);

// rho_adi = U rho_dia U^T
DensityMatrix to_adiabatic(const DensityMatrix& rho, double t);
// rho_dia = U^T rho_adi U
DensityMatrix to_diabatic(const DensityMatrix& rho, double t);

// Asymptotic probability exp(-pi z) to stay in diabatic state 1 without measurement.
double lz_survival_probability(double z);

// (1/2)(1 + exp(-2 V^2 T^2 / N)) for N projective checks over time T.
double zeno_projective_survival(double coupling, double total_time, int n_measurements);

// 4 z^2 lambda / ((2 lambda)^2 + (2 z t)^2); equals z^2/lambda at t = 0.
double strong_measurement_rate(double z, double lambda, double t);

// Adiabatic-elimination estimate -i z drho / (2 i z t + 2 lambda) of the diabatic coherence.
cplx approx_coherence(double delta_rho, double t, double z, double lambda);

// exp(-z): rough frozen population difference once lambda/z > 1.
double freeze_estimate(double z);

}  // namespace lzmeas

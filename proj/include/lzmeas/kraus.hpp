#pragma once

#include "lzmeas/density.hpp"
#include "lzmeas/dynamics.hpp"
#include "lzmeas/lz_model.hpp"
#include "lzmeas/matrix2.hpp"

// Gaussian weak measurement and the repeated-measurement propagation that
// serves as an independent check on the master-equation dynamics.
namespace lzmeas {

// K_a = (2 lambda_bar / pi)^(1/4) exp(-lambda_bar (a - A)^2) for an observable
// with eigenvalues +-1. lambda_bar -> infinity is a projective measurement.
struct GaussianMeasurement {
  double lambda_bar = 0.0;
  Mat2 observable = pauli::z;

  // Throws std::invalid_argument for lambda_bar < 0 or an observable that
  // is not Hermitian with A^2 = I.
  void validate() const;
};

Mat2 kraus_operator(double a, const GaussianMeasurement& meas);

// P(a) = Tr[K_a rho K_a^dagger]
double measurement_pdf(const DensityMatrix& rho, double a, const GaussianMeasurement& meas);

// K_a rho K_a^dagger / P(a). Throws std::domain_error when P(a) underflows to zero.
DensityMatrix selective_update(const DensityMatrix& rho, double a, const GaussianMeasurement& meas);

// Integral over outcomes of K_a rho K_a^dagger, in closed form: coherences
// between the +-1 eigenspaces are damped by exp(-2 lambda_bar).
DensityMatrix nonselective_channel(const DensityMatrix& rho, const GaussianMeasurement& meas);

// Hermitian generator of the free evolution in the protocol's propagation
// frame; in the adiabatic frame it includes the gauge term.
Mat2 effective_hamiltonian(const Protocol& p, const LzParams& params, double t,
                           GaugeSign gauge = GaugeSign::standard);

// exp(-i H dt) rho exp(+i H dt) with H frozen at the interval midpoint t + dt/2.
DensityMatrix unitary_step(const DensityMatrix& rho, double t, double dt, const Protocol& p,
                           const LzParams& params, GaugeSign gauge = GaugeSign::standard);

// Alternates unitary_step and nonselective_channel with per-shot strength
// lambda_bar = lambda * dt_meas, over the window of `cfg` (sampled with its stride).
Trajectory discrete_propagate(const SimConfig& cfg, double dt_meas);

// Degenerate levels, coupling V: N intervals of free evolution T/N, each
// followed by a projective population measurement. Returns P(state 1).
double projective_zeno_simulate(double coupling, double total_time, int n_measurements);

}  // namespace lzmeas

#include "lzmeas/kraus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace lzmeas {

namespace {

struct Projectors {
  Mat2 plus;
  Mat2 minus;
};

Projectors eigen_projectors(const Mat2& observable) {
  return {0.5 * (Mat2::identity() + observable), 0.5 * (Mat2::identity() - observable)};
}

// (2 lb / pi)^(1/4) exp(-lb x^2)
double gaussian_amplitude(double lambda_bar, double x) {
  return std::pow(2.0 * lambda_bar / M_PI, 0.25) * std::exp(-lambda_bar * x * x);
}

}  // namespace

void GaussianMeasurement::validate() const {
  if (!(lambda_bar >= 0.0))
    throw std::invalid_argument(fmt::format("measurement strength must be >= 0 (got {})", lambda_bar));
  if (hermiticity_error(observable) > 1e-12)
    throw std::invalid_argument("measured observable must be Hermitian");
  if ((observable * observable - Mat2::identity()).max_abs() > 1e-12)
    throw std::invalid_argument("measured observable must have eigenvalues +-1");
}

Mat2 kraus_operator(double a, const GaussianMeasurement& meas) {
  meas.validate();
  const auto [plus, minus] = eigen_projectors(meas.observable);
  return gaussian_amplitude(meas.lambda_bar, a - 1.0) * plus +
         gaussian_amplitude(meas.lambda_bar, a + 1.0) * minus;
}

double measurement_pdf(const DensityMatrix& rho, double a, const GaussianMeasurement& meas) {
  const Mat2 k = kraus_operator(a, meas);
  return (k * rho.matrix() * k.adjoint()).trace().real();
}

DensityMatrix selective_update(const DensityMatrix& rho, double a, const GaussianMeasurement& meas) {
  const Mat2 k = kraus_operator(a, meas);
  const Mat2 unnormalized = k * rho.matrix() * k.adjoint();
  const double p = unnormalized.trace().real();
  if (!(p > 0.0) || !std::isfinite(p))
    throw std::domain_error(fmt::format("selective_update: outcome a={} has zero probability", a));
  DensityMatrix out{unnormalized * (1.0 / p), rho.basis()};
  out.hermitize();
  return out;
}

DensityMatrix nonselective_channel(const DensityMatrix& rho, const GaussianMeasurement& meas) {
  meas.validate();
  const auto [plus, minus] = eigen_projectors(meas.observable);
  const Mat2& m = rho.matrix();
  const double damping = std::exp(-2.0 * meas.lambda_bar);
  return {plus * m * plus + minus * m * minus + damping * (plus * m * minus + minus * m * plus),
          rho.basis()};
}

Mat2 effective_hamiltonian(const Protocol& p, const LzParams& params, double t, GaugeSign gauge) {
  switch (p.kind) {
    case ProtocolKind::diabatic_measurement:
      return hamiltonian_diabatic(t, params.z);
    case ProtocolKind::adiabatic_measurement: {
      // -i[H, rho] + c [M, rho] == -i[H + i c M, rho]
      const auto e = adiabatic_energies(t, params.z);
      return Mat2::diag(e.upper, e.lower) + (kI * gauge_coefficient(gauge)) * gauge_term_m(t);
    }
    case ProtocolKind::static_two_level:
      return Mat2{0.5 * p.delta_epsilon, params.z, params.z, -0.5 * p.delta_epsilon};
  }
  return Mat2::zero();
}

DensityMatrix unitary_step(const DensityMatrix& rho, double t, double dt, const Protocol& p,
                           const LzParams& params, GaugeSign gauge) {
  require_basis(rho, p.propagation_basis(), "unitary_step");
  if (dt == 0.0) return rho;
  const Mat2 u = unitary_exponential(effective_hamiltonian(p, params, t + 0.5 * dt, gauge), dt);
  DensityMatrix out{u * rho.matrix() * u.adjoint(), rho.basis()};
  out.hermitize();
  return out;
}

Trajectory discrete_propagate(const SimConfig& cfg, double dt_meas) {
  cfg.validate();
  if (!(dt_meas > 0.0)) throw std::invalid_argument("discrete_propagate: dt_meas must be > 0");
  Trajectory traj;
  traj.window = resolve_window(cfg);
  traj.dt = dt_meas;
  traj.steps = step_count(traj.window, dt_meas);

  const double h_scale = cfg.params.z * std::max({std::abs(traj.window.t_start),
                                                  std::abs(traj.window.t_end), 1.0});
  if (cfg.protocol.is_sweep() && h_scale * dt_meas > 0.1)
    traj.warnings.push_back(fmt::format(
        "z*max(|t|,1)*dt_meas = {:.3g} > 0.1: frozen-Hamiltonian steps are coarse", h_scale * dt_meas));

  const GaussianMeasurement meas{cfg.params.lambda * dt_meas, pauli::z};
  const std::size_t stride = static_cast<std::size_t>(cfg.sample_stride);
  DensityMatrix rho = initial_state(cfg, traj.window);
  traj.samples.push_back(make_sample(cfg.protocol, cfg.params, traj.window.t_start, rho));
  for (std::size_t i = 0; i < traj.steps; ++i) {
    const double t = traj.window.t_start + static_cast<double>(i) * dt_meas;
    rho = unitary_step(rho, t, dt_meas, cfg.protocol, cfg.params, cfg.gauge);
    rho = nonselective_channel(rho, meas);
    if ((i + 1) % stride == 0 || i + 1 == traj.steps)
      traj.samples.push_back(make_sample(cfg.protocol, cfg.params, t + dt_meas, rho));
  }
  return traj;
}

double projective_zeno_simulate(double coupling, double total_time, int n_measurements) {
  if (n_measurements < 1) throw std::invalid_argument("projective_zeno_simulate: N must be >= 1");
  if (!(total_time > 0.0)) throw std::invalid_argument("projective_zeno_simulate: T must be > 0");
  const double tau = total_time / n_measurements;
  const Mat2 u = unitary_exponential(Mat2{0.0, coupling, coupling, 0.0}, tau);
  Mat2 rho = Mat2::diag(1.0, 0.0);
  for (int i = 0; i < n_measurements; ++i) {
    rho = u * rho * u.adjoint();
    rho = Mat2::diag(rho(0, 0).real(), rho(1, 1).real());
  }
  return rho(0, 0).real();
}

}  // namespace lzmeas

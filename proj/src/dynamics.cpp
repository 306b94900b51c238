#include "lzmeas/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <fmt/format.h>

namespace lzmeas {

namespace {

constexpr double kAbortEigenvalue = -1e-6;
constexpr double kRenormalizeTol = 1e-12;

// Writing H = h0 + h.sigma and rho = (I + r.sigma)/2, the master equation of
// every protocol becomes dr/dt = 2 h x r - 2 lambda (x, y, 0).
Eigen::Vector3d field(const Protocol& p, const LzParams& params, GaugeSign gauge, double t) {
  const double z = params.z;
  switch (p.kind) {
    case ProtocolKind::diabatic_measurement:
      return {z, 0.0, z * t};
    case ProtocolKind::adiabatic_measurement:
      // c [M, rho] with M = m i sigma_y is -i [-c m sigma_y, rho].
      return {0.0, -gauge_coefficient(gauge) * gauge_term_m(t)(0, 1).real(), adiabatic_energies(t, z).upper};
    case ProtocolKind::static_two_level:
      return {z, 0.0, 0.5 * p.delta_epsilon};
  }
  return Eigen::Vector3d::Zero();
}

Eigen::Matrix3d bloch_generator(const Eigen::Vector3d& h, double lambda) {
  Eigen::Matrix3d a;
  a << -2.0 * lambda, -2.0 * h(2), 2.0 * h(1),
       2.0 * h(2), -2.0 * lambda, -2.0 * h(0),
       -2.0 * h(1), 2.0 * h(0), 0.0;
  return a;
}

Eigen::Matrix3d bloch_generator(const Protocol& p, const LzParams& params, GaugeSign gauge, double t) {
  return bloch_generator(field(p, params, gauge, t), params.lambda);
}

Eigen::Vector3d to_vec(const BlochVector& b) { return {b.x, b.y, b.w}; }
BlochVector from_vec(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }

Eigen::Matrix3d magnus4_single(const Protocol& p, const LzParams& params, GaugeSign gauge, double t, double dt) {
  static const double kOffset = std::sqrt(3.0) / 6.0;
  const Eigen::Matrix3d a1 = bloch_generator(p, params, gauge, t + (0.5 - kOffset) * dt);
  const Eigen::Matrix3d a2 = bloch_generator(p, params, gauge, t + (0.5 + kOffset) * dt);
  const Eigen::Matrix3d omega =
      0.5 * dt * (a1 + a2) + (std::sqrt(3.0) / 12.0) * dt * dt * (a2 * a1 - a1 * a2);
  return omega.exp();
}

// The Magnus series only converges while dt * |A| stays below pi, and a
// rotation axis that turns during the step (diabatic frame, large z|t|) is
// resolved badly well before that. Steps are split so each piece turns the
// Bloch vector by at most kMaxTurn radians.
constexpr double kMaxTurn = 2.0;

Eigen::Matrix3d magnus4_propagator(const Protocol& p, const LzParams& params, GaugeSign gauge, double t,
                                   double dt) {
  const double rate = 2.0 * field(p, params, gauge, t + 0.5 * dt).norm() + 2.0 * params.lambda;
  const int pieces = std::max(1, static_cast<int>(std::ceil(dt * rate / kMaxTurn)));
  if (pieces == 1) return magnus4_single(p, params, gauge, t, dt);
  const double h = dt / pieces;
  Eigen::Matrix3d prop = Eigen::Matrix3d::Identity();
  for (int k = 0; k < pieces; ++k) prop = magnus4_single(p, params, gauge, t + k * h, h) * prop;
  return prop;
}

[[noreturn]] void abort_step(double t, double dt, double eig) {
  throw IntegrationAbort(fmt::format(
      "step at t={:.6g} with dt={:.6g} produced eigenvalue {:.3e}; reduce the step size", t, dt, eig));
}

}  // namespace

std::string protocol_name(const Protocol& p) {
  switch (p.kind) {
    case ProtocolKind::diabatic_measurement: return "diabatic";
    case ProtocolKind::adiabatic_measurement: return "adiabatic";
    case ProtocolKind::static_two_level: return "static";
  }
  return "?";
}

Protocol parse_protocol(std::string_view name, double delta_epsilon) {
  if (name == "diabatic") return Protocol::diabatic();
  if (name == "adiabatic") return Protocol::adiabatic();
  if (name == "static") return Protocol::static_two_level(delta_epsilon);
  throw std::invalid_argument(fmt::format("unknown protocol '{}'", name));
}

double frame_time(const Protocol& p, const LzParams& params, double t) {
  if (p.kind == ProtocolKind::static_two_level) return p.delta_epsilon / (2.0 * params.z);
  return t;
}

std::string stepper_name(Stepper s) { return s == Stepper::magnus4 ? "magnus4" : "rk4"; }

Stepper parse_stepper(std::string_view name) {
  if (name == "magnus4") return Stepper::magnus4;
  if (name == "rk4") return Stepper::rk4;
  throw std::invalid_argument(fmt::format("unknown stepper '{}'", name));
}

void SimConfig::validate() const {
  params.validate();
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_start < t_end))
    throw std::invalid_argument(fmt::format("t-start ({}) must be below t-end ({})", t_start, t_end));
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument(fmt::format("dt must be > 0 (got {})", dt));
  if (dt < kMinDt || dt > kMaxDt)
    throw std::invalid_argument(fmt::format("dt must lie in [{}, {}] (got {})", kMinDt, kMaxDt, dt));
  if (sample_stride < 1) throw std::invalid_argument("stride must be >= 1");
  if (!std::isfinite(protocol.delta_epsilon))
    throw std::invalid_argument("delta-epsilon must be finite");
  if (initial) {
    if (initial->basis() != protocol.propagation_basis())
      throw BasisMismatch(fmt::format("initial state is {} but the {} protocol propagates in the {} basis",
                                      to_string(initial->basis()), protocol_name(protocol),
                                      to_string(protocol.propagation_basis())));
    const auto rep = validate_density(*initial);
    if (!rep.valid()) throw std::invalid_argument("initial state: " + rep.violations.front());
  }
}

Window resolve_window(const SimConfig& cfg) {
  Window w{cfg.t_start, cfg.t_end};
  if (!cfg.window_pinned && cfg.protocol.is_sweep() && cfg.params.lambda > 0.0) {
    const double reach = 4.0 * cfg.params.lambda / cfg.params.z;
    if (reach > w.t_end) {
      w.t_end = reach;
      w.t_start = std::min(w.t_start, -reach);
    }
  }
  return w;
}

std::size_t step_count(const Window& w, double dt) {
  const double span = w.t_end - w.t_start;
  const double n = std::round(span / dt);
  if (n < 1.0 || std::abs(n * dt - span) > 1e-9 * std::max(1.0, span))
    throw std::invalid_argument(
        fmt::format("window length {} is not an integer multiple of dt={}", span, dt));
  return static_cast<std::size_t>(n);
}

DensityMatrix initial_state(const SimConfig& cfg, const Window& w) {
  if (cfg.initial) return *cfg.initial;
  const Basis basis = cfg.protocol.propagation_basis();
  if (basis == Basis::diabatic) return DensityMatrix::diag(1.0, 0.0, Basis::diabatic);
  if (cfg.initial_kind == InitialState::diabatic_level_one)
    return to_adiabatic(DensityMatrix::diag(1.0, 0.0, Basis::diabatic), w.t_start);
  return DensityMatrix::diag(0.0, 1.0, Basis::adiabatic);
}

Sample make_sample(const Protocol& p, const LzParams& params, double t, const DensityMatrix& rho) {
  const double tf = frame_time(p, params, t);
  Sample s{t, rho, 0.0, 0.0, 0.0, 0.0, rho.coherence()};
  if (rho.basis() == Basis::diabatic) {
    const DensityMatrix adi = to_adiabatic(rho, tf);
    s.p1_dia = rho.p1();
    s.p2_dia = rho.p2();
    s.p1_adi = adi.p1();
    s.p2_adi = adi.p2();
  } else {
    const DensityMatrix dia = to_diabatic(rho, tf);
    s.p1_dia = dia.p1();
    s.p2_dia = dia.p2();
    s.p1_adi = rho.p1();
    s.p2_adi = rho.p2();
  }
  return s;
}

Mat2 lindblad_generator(const Protocol& p, const LzParams& params, GaugeSign gauge, const Mat2& rho,
                        double t) {
  const double z = params.z;
  Mat2 out;
  switch (p.kind) {
    case ProtocolKind::diabatic_measurement:
      out = -kI * commutator(hamiltonian_diabatic(t, z), rho);
      break;
    case ProtocolKind::adiabatic_measurement: {
      const auto e = adiabatic_energies(t, z);
      out = -kI * commutator(Mat2::diag(e.upper, e.lower), rho) +
            gauge_coefficient(gauge) * commutator(gauge_term_m(t), rho);
      break;
    }
    case ProtocolKind::static_two_level: {
      const Mat2 h{0.5 * p.delta_epsilon, z, z, -0.5 * p.delta_epsilon};
      out = -kI * commutator(h, rho);
      break;
    }
  }
  // The measured observable is sigma_z in the propagation basis for every protocol.
  return out + dephasing_term(pauli::z, rho, params.lambda);
}

namespace {

void require_valid_state(const DensityMatrix& rho, const char* where) {
  const auto rep = validate_density(rho);
  if (!rep.valid()) throw std::invalid_argument(fmt::format("{}: {}", where, rep.violations.front()));
}

}  // namespace

Mat2 rhs_diabatic(const DensityMatrix& rho, double t, const LzParams& params) {
  params.validate();
  require_basis(rho, Basis::diabatic, "rhs_diabatic");
  require_valid_state(rho, "rhs_diabatic");
  return lindblad_generator(Protocol::diabatic(), params, GaugeSign::standard, rho.matrix(), t);
}

Mat2 rhs_adiabatic(const DensityMatrix& rho, double t, const LzParams& params, GaugeSign gauge) {
  params.validate();
  require_basis(rho, Basis::adiabatic, "rhs_adiabatic");
  require_valid_state(rho, "rhs_adiabatic");
  return lindblad_generator(Protocol::adiabatic(), params, gauge, rho.matrix(), t);
}

Mat2 rhs_static(const DensityMatrix& rho, const LzParams& params, double delta_epsilon) {
  params.validate();
  require_basis(rho, Basis::diabatic, "rhs_static");
  require_valid_state(rho, "rhs_static");
  return lindblad_generator(Protocol::static_two_level(delta_epsilon), params, GaugeSign::standard,
                            rho.matrix(), 0.0);
}

DensityMatrix rk4_step(const Rhs& rhs, const DensityMatrix& rho, double t, double dt, StepStats* stats) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be > 0");
  const Mat2& y = rho.matrix();
  const Mat2 k1 = rhs(y, t);
  const Mat2 k2 = rhs(y + (0.5 * dt) * k1, t + 0.5 * dt);
  const Mat2 k3 = rhs(y + (0.5 * dt) * k2, t + 0.5 * dt);
  const Mat2 k4 = rhs(y + dt * k3, t + dt);
  DensityMatrix out{y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), rho.basis()};
  out.hermitize();
  if (std::abs(out.matrix().trace().real() - 1.0) > kRenormalizeTol) {
    out.renormalize();
    if (stats) ++stats->renormalizations;
  }
  const double eig = min_eigenvalue(out.matrix());
  if (!(eig >= kAbortEigenvalue)) abort_step(t, dt, eig);
  return out;
}

DensityMatrix magnus4_step(const Protocol& p, const LzParams& params, GaugeSign gauge,
                           const DensityMatrix& rho, double t, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("magnus4_step: dt must be > 0");
  require_basis(rho, p.propagation_basis(), "magnus4_step");
  const Eigen::Vector3d r = magnus4_propagator(p, params, gauge, t, dt) * to_vec(rho.bloch());
  const double eig = 0.5 * (1.0 - r.norm());
  if (!(eig >= kAbortEigenvalue)) abort_step(t, dt, eig);
  return DensityMatrix::from_bloch(from_vec(r), rho.basis());
}

Trajectory integrate(const SimConfig& cfg) {
  cfg.validate();
  Trajectory traj;
  traj.window = resolve_window(cfg);
  traj.dt = cfg.dt;
  traj.steps = step_count(traj.window, cfg.dt);

  const LzParams& params = cfg.params;
  if (cfg.protocol.is_sweep() && params.lambda / params.z > 0.5 * traj.window.t_end) {
    traj.window_converged = false;
    traj.warnings.push_back(fmt::format(
        "lambda/z = {:.4g} exceeds half of t_end = {:.4g}: the evolution may not have frozen by t_end",
        params.lambda / params.z, traj.window.t_end));
  }

  const std::size_t stride = static_cast<std::size_t>(cfg.sample_stride);
  traj.samples.reserve(traj.steps / stride + 2);

  DensityMatrix rho = initial_state(cfg, traj.window);
  auto record = [&](std::size_t i) {
    const double t = traj.window.t_start + static_cast<double>(i) * cfg.dt;
    const auto rep = validate_density(rho);
    if (!rep.valid())
      throw IntegrationAbort(fmt::format("state at t={:.6g} failed validation: {}", t, rep.violations.front()));
    traj.samples.push_back(make_sample(cfg.protocol, params, t, rho));
  };

  record(0);
  if (cfg.stepper == Stepper::rk4) {
    StepStats stats;
    const Rhs rhs = [&](const Mat2& m, double t) {
      return lindblad_generator(cfg.protocol, params, cfg.gauge, m, t);
    };
    for (std::size_t i = 0; i < traj.steps; ++i) {
      const double t = traj.window.t_start + static_cast<double>(i) * cfg.dt;
      rho = rk4_step(rhs, rho, t, cfg.dt, &stats);
      if ((i + 1) % stride == 0 || i + 1 == traj.steps) record(i + 1);
    }
    traj.renormalizations = stats.renormalizations;
  } else {
    // Bloch-vector propagation keeps the trace and Hermiticity exact.
    Eigen::Vector3d r = to_vec(rho.bloch());
    const Basis basis = rho.basis();
    for (std::size_t i = 0; i < traj.steps; ++i) {
      const double t = traj.window.t_start + static_cast<double>(i) * cfg.dt;
      r = magnus4_propagator(cfg.protocol, params, cfg.gauge, t, cfg.dt) * r;
      const double eig = 0.5 * (1.0 - r.norm());
      if (!(eig >= kAbortEigenvalue)) abort_step(t, cfg.dt, eig);
      if ((i + 1) % stride == 0 || i + 1 == traj.steps) {
        rho = DensityMatrix::from_bloch(from_vec(r), basis);
        record(i + 1);
      }
    }
  }
  return traj;
}

InvariantSummary summarize_invariants(const Trajectory& traj) {
  InvariantSummary s;
  double prev_purity = 0.0;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const Sample& smp = traj.samples[i];
    const double pur = purity(smp.rho);
    s.max_trace_error = std::max(s.max_trace_error, std::abs(smp.rho.matrix().trace() - 1.0));
    s.min_eigenvalue = std::min(s.min_eigenvalue, min_eigenvalue(smp.rho.matrix()));
    s.max_purity_deviation = std::max(s.max_purity_deviation, std::abs(1.0 - pur));
    s.max_population_sum_error =
        std::max({s.max_population_sum_error, std::abs(smp.p1_dia + smp.p2_dia - 1.0),
                  std::abs(smp.p1_adi + smp.p2_adi - 1.0)});
    if (i > 0) s.max_purity_increase = std::max(s.max_purity_increase, pur - prev_purity);
    prev_purity = pur;
  }
  return s;
}

}  // namespace lzmeas

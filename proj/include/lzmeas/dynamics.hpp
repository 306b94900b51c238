#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lzmeas/density.hpp"
#include "lzmeas/lz_model.hpp"

namespace lzmeas {

enum class ProtocolKind { diabatic_measurement, adiabatic_measurement, static_two_level };

// Which populations are continuously monitored. The static two-level variant
// replaces the sweep 2zt by a constant splitting and monitors diabatic levels.
struct Protocol {
  ProtocolKind kind = ProtocolKind::diabatic_measurement;
  double delta_epsilon = 0.0;  // H11 - H22, static variant only

  static Protocol diabatic() { return {ProtocolKind::diabatic_measurement, 0.0}; }
  static Protocol adiabatic() { return {ProtocolKind::adiabatic_measurement, 0.0}; }
  static Protocol static_two_level(double delta_epsilon) {
    return {ProtocolKind::static_two_level, delta_epsilon};
  }

  Basis propagation_basis() const {
    return kind == ProtocolKind::adiabatic_measurement ? Basis::adiabatic : Basis::diabatic;
  }
  bool is_sweep() const { return kind != ProtocolKind::static_two_level; }
};

// "diabatic" | "adiabatic" | "static"
std::string protocol_name(const Protocol& p);
Protocol parse_protocol(std::string_view name, double delta_epsilon = 0.0);

// Time at which the LZ rotation U(t) diagonalizes the protocol Hamiltonian.
// For the static variant this is the constant delta_epsilon / (2z).
double frame_time(const Protocol& p, const LzParams& params, double t);

enum class Stepper { magnus4, rk4 };

std::string stepper_name(Stepper s);
Stepper parse_stepper(std::string_view name);

enum class InitialState {
  protocol_default,   // diag(1,0) diabatic, or diag(0,1) adiabatic (ground state)
  diabatic_level_one  // diag(1,0) in the diabatic basis, rotated into the propagation basis
};

struct Window {
  double t_start;
  double t_end;
};

struct SimConfig {
  LzParams params;
  Protocol protocol = Protocol::diabatic();
  double t_start = -200.0;
  double t_end = 200.0;
  // When false, sweep protocols widen the window to +-4 lambda/z if that exceeds it.
  bool window_pinned = false;
  double dt = 0.005;
  int sample_stride = 20;
  InitialState initial_kind = InitialState::protocol_default;
  std::optional<DensityMatrix> initial;  // overrides initial_kind
  Stepper stepper = Stepper::magnus4;
  GaugeSign gauge = GaugeSign::standard;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

inline constexpr double kMinDt = 0.001;
inline constexpr double kMaxDt = 0.02;

Window resolve_window(const SimConfig& cfg);
std::size_t step_count(const Window& w, double dt);
DensityMatrix initial_state(const SimConfig& cfg, const Window& w);

struct Sample {
  double t;
  DensityMatrix rho;  // propagation basis
  double p1_dia;
  double p2_dia;
  double p1_adi;
  double p2_adi;
  cplx coherence;  // rho12 in the propagation basis
};

Sample make_sample(const Protocol& p, const LzParams& params, double t, const DensityMatrix& rho);

struct Trajectory {
  std::vector<Sample> samples;
  Window window{};
  double dt = 0.0;
  std::size_t steps = 0;
  std::size_t renormalizations = 0;
  // False when lambda/z is large enough that the evolution may still be
  // moving at t_end (freeze time ~ lambda/z).
  bool window_converged = true;
  std::vector<std::string> warnings;
};

class IntegrationAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Linear map rho -> d rho/dt of the protocol's master equation at time t.
// No state validation: it is applied to basis matrices as well as states.
Mat2 lindblad_generator(const Protocol& p, const LzParams& params, GaugeSign gauge, const Mat2& rho,
                        double t);

Mat2 rhs_diabatic(const DensityMatrix& rho, double t, const LzParams& params);
Mat2 rhs_adiabatic(const DensityMatrix& rho, double t, const LzParams& params,
                   GaugeSign gauge = GaugeSign::standard);
Mat2 rhs_static(const DensityMatrix& rho, const LzParams& params, double delta_epsilon);

using Rhs = std::function<Mat2(const Mat2& rho, double t)>;

struct StepStats {
  std::size_t renormalizations = 0;
};

// Classical fourth-order Runge-Kutta step. The result is re-Hermitized and
// renormalized when the trace drifts by more than 1e-12. Throws
// IntegrationAbort if the step leaves an eigenvalue below -1e-6.
DensityMatrix rk4_step(const Rhs& rhs, const DensityMatrix& rho, double t, double dt,
                       StepStats* stats = nullptr);

// Fourth-order Magnus step on the Bloch vector: two Gauss-Legendre generator
// samples, one commutator correction, exact exponential.
DensityMatrix magnus4_step(const Protocol& p, const LzParams& params, GaugeSign gauge,
                           const DensityMatrix& rho, double t, double dt);

Trajectory integrate(const SimConfig& cfg);

struct InvariantSummary {
  double max_trace_error = 0.0;
  double min_eigenvalue = 1.0;
  double max_purity_increase = 0.0;  // over consecutive samples
  double max_purity_deviation = 0.0;  // |1 - purity|
  double max_population_sum_error = 0.0;
};

InvariantSummary summarize_invariants(const Trajectory& traj);

}  // namespace lzmeas

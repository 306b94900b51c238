#include <doctest.h>

#include <cmath>

#include "lzmeas/dynamics.hpp"
#include "lzmeas/experiments.hpp"
#include "support.hpp"

using namespace lzmeas;

namespace {

SimConfig static_config(double z, double lambda, double t_end, double dt, Stepper s) {
  SimConfig cfg;
  cfg.params = {z, lambda};
  cfg.protocol = Protocol::static_two_level(0.0);
  cfg.t_start = 0.0;
  cfg.t_end = t_end;
  cfg.window_pinned = true;
  cfg.dt = dt;
  cfg.sample_stride = 1;
  cfg.stepper = s;
  return cfg;
}

double endpoint_p1(SimConfig cfg) { return integrate(cfg).samples.back().p1_dia; }

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("right-hand sides") {
  const LzParams params{0.5, 2.0};
  const DensityMatrix rho{Mat2{0.6, cplx{0.1, 0.3}, cplx{0.1, -0.3}, 0.4}, Basis::diabatic};
  const double t = 1.7;
  const Eigen::Matrix2cd h = test::to_eigen(hamiltonian_diabatic(t, 0.5));
  const Eigen::Matrix2cd r = test::to_eigen(rho.matrix());
  Eigen::Matrix2cd expected = cplx{0.0, -1.0} * (h * r - r * h);
  expected(0, 1) -= 2.0 * params.lambda * r(0, 1);
  expected(1, 0) -= 2.0 * params.lambda * r(1, 0);
  CHECK((rhs_diabatic(rho, t, params) - test::from_eigen(expected)).max_abs() < 1e-14);

  const Mat2 g = rhs_diabatic(rho, t, params);
  CHECK(std::abs(g.trace()) < 1e-15);
  CHECK(hermiticity_error(g) < 1e-15);

  CHECK_THROWS_AS(rhs_diabatic(DensityMatrix::diag(1, 0, Basis::adiabatic), t, params), BasisMismatch);
  CHECK_THROWS_AS(rhs_adiabatic(rho, t, params), BasisMismatch);
  CHECK_THROWS_AS((rhs_diabatic(rho, t, LzParams{-1.0, 0.0})), std::invalid_argument);
  CHECK_THROWS_AS(rhs_diabatic(DensityMatrix::diag(1.2, -0.2, Basis::diabatic), t, params),
                  std::invalid_argument);
}

TEST_CASE("static variant reduces to Rabi oscillation") {
  for (Stepper s : {Stepper::magnus4, Stepper::rk4}) {
    const Trajectory traj = integrate(static_config(0.5, 0.0, 20.0, 0.01, s));
    for (const auto& smp : traj.samples) {
      const double c = std::cos(0.5 * smp.t);
      CHECK(smp.p1_dia == doctest::Approx(c * c).epsilon(1e-8));
    }
  }
}

TEST_CASE("strong dephasing rate from the slow eigenvalue") {
  // d(x,y,w)/dt = A (x,y,w) for H = z sx and sz dephasing.
  for (double lambda : {10.0, 20.0}) {
    const double z = 0.5;
    Eigen::Matrix3d a;
    a << -2 * lambda, 0, 0, 0, -2 * lambda, -2 * z, 0, 2 * z, 0;
    const Eigen::Vector3cd ev = a.eigenvalues();
    double slow = -1e300;
    for (int i = 0; i < 3; ++i) slow = std::max(slow, ev(i).real());
    const double rate = -slow;
    const Trajectory traj = integrate(static_config(z, lambda, 80.0, 0.005, Stepper::magnus4));
    CHECK(fit_decay_rate(traj, 5.0, 80.0) == doctest::Approx(rate).epsilon(1e-3));
    // Adiabatic elimination of the coherence gives 2 z^2 / lambda.
    CHECK(rate == doctest::Approx(2 * z * z / lambda).epsilon(0.01));
  }
}

TEST_CASE("step halving shows fourth-order convergence") {
  for (Stepper s : {Stepper::rk4, Stepper::magnus4}) {
    SimConfig cfg;
    cfg.params = {0.5, 0.3};
    cfg.t_start = -5.0;
    cfg.t_end = 5.0;
    cfg.window_pinned = true;
    cfg.stepper = s;
    auto at = [&](double dt) {
      SimConfig c = cfg;
      c.dt = dt;
      c.sample_stride = 1000000;
      return endpoint_p1(c);
    };
    const double p1 = at(0.02), p2 = at(0.01), p3 = at(0.005);
    const double ratio = (p1 - p2) / (p2 - p3);
    CHECK(ratio == doctest::Approx(16.0).epsilon(0.15));
  }
}

TEST_CASE("no-measurement limit reproduces the LZ formula") {
  for (double z : {0.1, 0.5, 1.0}) {
    SimConfig cfg;
    cfg.params = {z, 0.0};
    const Trajectory traj = integrate(cfg);
    CHECK(extract_asymptote(traj, Basis::diabatic, 1).value ==
          doctest::Approx(lz_survival_probability(z)).epsilon(0.02 / lz_survival_probability(z)));
  }
}

TEST_CASE("purity is conserved without measurement and decays with it") {
  for (Protocol p : {Protocol::diabatic(), Protocol::adiabatic()}) {
    SimConfig cfg;
    cfg.protocol = p;
    cfg.params = {0.5, 0.0};
    cfg.t_start = -50.0;
    cfg.t_end = 50.0;
    cfg.window_pinned = true;
    cfg.sample_stride = 1;
    auto s = summarize_invariants(integrate(cfg));
    CHECK(s.max_purity_deviation < 1e-10);
    cfg.params.lambda = 0.7;
    s = summarize_invariants(integrate(cfg));
    CHECK(s.max_purity_increase < 1e-12);
    CHECK(s.max_trace_error < 1e-12);
    CHECK(s.min_eigenvalue > -1e-12);
  }
}

TEST_CASE("adiabatic and diabatic frames agree for strong coupling") {
  SimConfig dia;
  dia.params = {5.0, 0.0};
  dia.window_pinned = true;
  SimConfig adi = dia;
  adi.protocol = Protocol::adiabatic();
  adi.initial_kind = InitialState::diabatic_level_one;
  const Trajectory a = integrate(adi), d = integrate(dia);
  REQUIRE(a.samples.size() == d.samples.size());
  double err = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    err = std::max(err, (to_diabatic(a.samples[i].rho, a.samples[i].t).matrix() - d.samples[i].rho.matrix()).max_abs());
  CHECK(err < 1e-6);
}

TEST_CASE("windows and step counts") {
  SimConfig cfg;
  cfg.params = {0.1, 20.0};
  Window w = resolve_window(cfg);
  CHECK(w.t_end == doctest::Approx(800.0));
  CHECK(w.t_start == doctest::Approx(-800.0));
  cfg.window_pinned = true;
  w = resolve_window(cfg);
  CHECK(w.t_end == 200.0);
  CHECK(step_count({-1.0, 1.0}, 0.005) == 400);
  CHECK_THROWS_AS((step_count({-1.0, 1.003}, 0.005)), std::invalid_argument);

  cfg.params = {0.05, 10.0};
  const Trajectory traj = integrate(cfg);
  CHECK_FALSE(traj.window_converged);
  CHECK_FALSE(traj.warnings.empty());
}

TEST_CASE("initial states") {
  SimConfig cfg;
  cfg.protocol = Protocol::adiabatic();
  const Window w = resolve_window(cfg);
  CHECK(initial_state(cfg, w).p2() == 1.0);
  cfg.initial_kind = InitialState::diabatic_level_one;
  const auto rho = initial_state(cfg, w);
  const auto expected = to_adiabatic(DensityMatrix::diag(1.0, 0.0, Basis::diabatic), w.t_start);
  CHECK((rho.matrix() - expected.matrix()).max_abs() < 1e-15);
  cfg.initial = DensityMatrix::diag(0.0, 1.0, Basis::diabatic);
  CHECK_THROWS(integrate(cfg));
}

TEST_CASE("configuration validation") {
  SimConfig cfg;
  cfg.dt = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.dt = 0.005;
  cfg.sample_stride = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.sample_stride = 1;
  cfg.t_end = cfg.t_start;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("plain RK4 aborts instead of returning an unphysical state") {
  SimConfig cfg;
  cfg.params = {5.0, 0.0};
  cfg.window_pinned = true;
  cfg.stepper = Stepper::rk4;
  CHECK_THROWS_AS(integrate(cfg), IntegrationAbort);
}

TEST_CASE("single steps") {
  const LzParams params{0.5, 1.0};
  const DensityMatrix rho = DensityMatrix::diag(1.0, 0.0, Basis::diabatic);
  const Rhs rhs = [&](const Mat2& m, double t) {
    return lindblad_generator(Protocol::diabatic(), params, GaugeSign::standard, m, t);
  };
  const auto a = rk4_step(rhs, rho, -1.0, 0.01);
  const auto b = magnus4_step(Protocol::diabatic(), params, GaugeSign::standard, rho, -1.0, 0.01);
  CHECK((a.matrix() - b.matrix()).max_abs() < 1e-10);
  CHECK_THROWS_AS(magnus4_step(Protocol::diabatic(), params, GaugeSign::standard, rho, 0.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("names round trip") {
  for (const char* n : {"diabatic", "adiabatic", "static"}) CHECK(protocol_name(parse_protocol(n)) == n);
  CHECK_THROWS_AS(parse_protocol("sideways"), std::invalid_argument);
  CHECK(stepper_name(parse_stepper("rk4")) == "rk4");
  CHECK(frame_time(Protocol::static_two_level(1.0), LzParams{0.5, 0.0}, 9.0) == doctest::Approx(1.0));
}

}

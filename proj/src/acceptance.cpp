#include "lzmeas/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <fmt/format.h>

#include "lzmeas/experiments.hpp"
#include "lzmeas/io.hpp"
#include "lzmeas/kraus.hpp"

namespace lzmeas {

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

SimConfig base_config(double z, double lambda, Protocol p, const AcceptanceOptions& opts) {
  SimConfig cfg;
  cfg.params = {z, lambda};
  cfg.protocol = p;
  cfg.gauge = opts.gauge;
  return cfg;
}

void pin(SimConfig& cfg, double t0, double t1) {
  cfg.t_start = t0;
  cfg.t_end = t1;
  cfg.window_pinned = true;
}

std::string join(const std::vector<double>& v, const char* fmt_spec = "{:.4g}") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt::format(fmt::runtime(fmt_spec), v[i]);
  }
  return out;
}

Outcome lz_limit(const AcceptanceOptions& opts) {
  const std::vector<double> zs = opts.fast ? std::vector<double>{0.05, 0.2, 1.0}
                                           : std::vector<double>{0.05, 0.1, 0.2, 0.5, 1.0};
  bool ok = true;
  std::string detail;
  for (double z : zs) {
    SimConfig cfg = base_config(z, 0.0, Protocol::diabatic(), opts);
    pin(cfg, -200.0, 200.0);
    const double p = extract_asymptote(integrate(cfg), Basis::diabatic, 1).value;
    const double expected = lz_survival_probability(z);
    ok = ok && std::abs(p - expected) <= 0.02;
    detail += fmt::format("z={}: {:.4f} vs {:.4f}; ", z, p, expected);
  }
  return {ok, detail};
}

Outcome plateau(const AcceptanceOptions& opts) {
  bool ok = true;
  std::string detail;
  double last_time = -1e300;
  for (double lambda : {5.0, 10.0, 20.0}) {
    SimConfig cfg = base_config(0.5, lambda, Protocol::diabatic(), opts);
    cfg.sample_stride = 2;
    const Trajectory traj = integrate(cfg);
    const double p1 = extract_asymptote(traj, Basis::diabatic, 1).value;
    const double p2 = extract_asymptote(traj, Basis::diabatic, 2).value;
    double reach = std::nan("");
    for (const auto& s : traj.samples)
      if (std::abs(s.p1_dia - s.p2_dia) < 0.1) {
        reach = s.t;
        break;
      }
    ok = ok && std::abs(p1 - 0.5) <= 0.02 && std::abs(p2 - 0.5) <= 0.02;
    ok = ok && std::isfinite(reach) && reach > last_time;
    last_time = reach;
    detail += fmt::format("lambda={}: p1={:.4f} p2={:.4f} reach={:.2f}; ", lambda, p1, p2, reach);
  }
  return {ok, detail};
}

Outcome strong_rate(const AcceptanceOptions& opts) {
  const double z = 0.5;
  std::vector<double> rates;
  bool ok = true;
  std::string detail;
  for (double lambda : {10.0, 20.0}) {
    SimConfig cfg = base_config(z, lambda, Protocol::static_two_level(0.0), opts);
    pin(cfg, 0.0, 80.0);
    cfg.sample_stride = 10;
    const double rate = fit_decay_rate(integrate(cfg), 5.0, 80.0);
    const double expected = z * z / lambda;
    ok = ok && std::abs(rate / expected - 1.0) <= 0.1;
    rates.push_back(rate);
    detail += fmt::format("lambda={}: fitted {:.5f} vs z^2/lambda {:.5f} (x{:.3f}); ", lambda, rate, expected,
                          rate / expected);
  }
  const double ratio = rates[0] / rates[1];
  ok = ok && std::abs(ratio / 2.0 - 1.0) <= 0.1;
  detail += fmt::format("ratio {:.4f}", ratio);
  return {ok, detail};
}

SweepResult adiabatic_scan(double z, std::vector<double> lambdas, const AcceptanceOptions& opts) {
  SweepSpec spec;
  spec.z_values = {z};
  spec.lambda_values = std::move(lambdas);
  spec.protocol = Protocol::adiabatic();
  spec.report_basis = Basis::adiabatic;
  spec.gauge = opts.gauge;
  spec.jobs = opts.jobs;
  return sweep(spec);
}

std::vector<double> survivals(const SweepResult& res) {
  std::vector<double> out;
  for (const auto& c : res.cells) out.push_back(c.survival);
  return out;
}

Outcome zeno_ordering(const AcceptanceOptions& opts) {
  const auto res = adiabatic_scan(0.05, {0.0, 0.5, 1.0, 2.0, 5.0}, opts);
  const auto s = survivals(res);
  bool ok = std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); });
  for (std::size_t i = 1; i < s.size(); ++i) ok = ok && s[i] > s[i - 1];
  return {ok, "survival " + join(s)};
}

Outcome nonmonotonic(const AcceptanceOptions& opts) {
  const auto res = adiabatic_scan(5.0, {0.0, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0}, opts);
  std::vector<double> ls;
  for (const auto& c : res.cells) ls.push_back(c.lambda);
  const auto s = survivals(res);
  const auto dip = find_dip(ls, s, 0.005);
  if (!dip) return {false, "no dip; survival " + join(s, "{:.6f}")};
  return {true, fmt::format("dip depth {:.4f} at lambda={} (lambda=0: {:.6f})", dip->depth, dip->lambda_min,
                            s.front())};
}

double max_element_error(const Mat2& a, const Mat2& b) { return (a - b).max_abs(); }

Outcome oracle(const AcceptanceOptions& opts) {
  SimConfig cfg = base_config(0.5, 1.0, Protocol::diabatic(), opts);
  pin(cfg, -20.0, 20.0);
  cfg.sample_stride = 1000000;
  SimConfig ref_cfg = cfg;
  ref_cfg.stepper = Stepper::rk4;
  ref_cfg.dt = 0.001;
  const Mat2 reference = integrate(ref_cfg).samples.back().rho.matrix();
  const double e1 = max_element_error(discrete_propagate(cfg, 1e-3).samples.back().rho.matrix(), reference);
  const double e2 = max_element_error(discrete_propagate(cfg, 5e-4).samples.back().rho.matrix(), reference);
  const double ratio = e1 / e2;
  const bool ok = e1 <= 1e-3 && std::abs(ratio / 2.0 - 1.0) <= 0.3;
  return {ok, fmt::format("error {:.3e} at dt_meas=1e-3, {:.3e} at 5e-4, ratio {:.3f}", e1, e2, ratio)};
}

Outcome basis_consistency(const AcceptanceOptions& opts) {
  bool ok = true;
  std::string detail;
  for (double z : {0.05, 0.5, 5.0}) {
    SimConfig dia = base_config(z, 0.0, Protocol::diabatic(), opts);
    pin(dia, -200.0, 200.0);
    SimConfig adi = dia;
    adi.protocol = Protocol::adiabatic();
    adi.initial_kind = InitialState::diabatic_level_one;
    const Trajectory a = integrate(adi);
    const Trajectory d = integrate(dia);
    double err = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
      err = std::max(err, max_element_error(to_diabatic(a.samples[i].rho, a.samples[i].t).matrix(),
                                            d.samples[i].rho.matrix()));
    ok = ok && err <= 1e-6;
    detail += fmt::format("z={}: {:.2e}; ", z, err);
  }
  return {ok, detail};
}

Outcome projective_zeno(const AcceptanceOptions&) {
  const std::vector<int> ns{1, 10, 100, 1000, 10000};
  bool ok = true;
  std::string detail;
  double previous = -1.0;
  for (int n : ns) {
    const double sim = projective_zeno_simulate(1.0, 1.0, n);
    const double formula = zeno_projective_survival(1.0, 1.0, n);
    if (n == 100) ok = ok && std::abs(sim - formula) <= 1e-3;
    if (n == 1000) ok = ok && std::abs(sim - formula) <= 1e-4;
    ok = ok && sim > previous;
    previous = sim;
    detail += fmt::format("N={}: {:.6f} vs {:.6f}; ", n, sim, formula);
  }
  return {ok && previous <= 1.0, detail};
}

struct GridPoint {
  double z, lambda;
  Protocol protocol;
};

std::vector<GridPoint> invariant_grid(const AcceptanceOptions& opts) {
  const std::vector<double> zs = opts.fast ? std::vector<double>{0.05, 5.0} : std::vector<double>{0.05, 0.5, 5.0};
  const std::vector<double> ls =
      opts.fast ? std::vector<double>{0.0, 5.0, 50.0} : std::vector<double>{0.0, 0.5, 5.0, 50.0};
  std::vector<GridPoint> out;
  for (Protocol p : {Protocol::diabatic(), Protocol::adiabatic()})
    for (double z : zs)
      for (double l : ls) out.push_back({z, l, p});
  return out;
}

Outcome invariants(const AcceptanceOptions& opts) {
  InvariantSummary worst;
  double worst_purity_zero = 0.0;
  for (const auto& g : invariant_grid(opts)) {
    SimConfig cfg = base_config(g.z, g.lambda, g.protocol, opts);
    pin(cfg, -200.0, 200.0);
    cfg.sample_stride = 1;
    const auto s = summarize_invariants(integrate(cfg));
    worst.max_trace_error = std::max(worst.max_trace_error, s.max_trace_error);
    worst.min_eigenvalue = std::min(worst.min_eigenvalue, s.min_eigenvalue);
    if (g.lambda > 0.0)
      worst.max_purity_increase = std::max(worst.max_purity_increase, s.max_purity_increase);
    else
      worst_purity_zero = std::max(worst_purity_zero, s.max_purity_deviation);
  }
  const bool ok = worst.max_trace_error <= 1e-9 && worst.min_eigenvalue >= -1e-8 &&
                  worst.max_purity_increase <= 1e-9 && worst_purity_zero <= 1e-8;
  return {ok, fmt::format("trace err {:.2e}, min eig {:.2e}, purity rise {:.2e}, |1-purity| at lambda=0 {:.2e}",
                          worst.max_trace_error, worst.min_eigenvalue, worst.max_purity_increase,
                          worst_purity_zero)};
}

Outcome convergence(const AcceptanceOptions& opts) {
  double worst = 0.0;
  std::string where;
  for (const auto& g : invariant_grid(opts)) {
    SimConfig cfg = base_config(g.z, g.lambda, g.protocol, opts);
    pin(cfg, -200.0, 200.0);
    cfg.sample_stride = 1000000;
    const Sample a = integrate(cfg).samples.back();
    cfg.dt *= 0.5;
    const Sample b = integrate(cfg).samples.back();
    const double d = std::max({std::abs(a.p1_dia - b.p1_dia), std::abs(a.p2_dia - b.p2_dia),
                               std::abs(a.p1_adi - b.p1_adi), std::abs(a.p2_adi - b.p2_adi)});
    if (d >= worst) {
      worst = d;
      where = fmt::format("{} z={} lambda={}", protocol_name(g.protocol), g.z, g.lambda);
    }
  }
  return {worst <= 1e-5, fmt::format("max endpoint difference {:.2e} ({})", worst, where)};
}

std::vector<std::string> zero_lambda_rows(const CsvTable& t) {
  std::vector<std::string> rows;
  const std::size_t cl = t.column("lambda");
  for (const auto& r : t.rows)
    if (parse_double(r[cl]) == 0.0) rows.push_back(fmt::format("{}", fmt::join(r, ",")));
  return rows;
}

Outcome freeze(const AcceptanceOptions& opts) {
  bool ok = true;
  std::string detail;
  for (double z : {0.5, 1.0}) {
    SimConfig cfg = base_config(z, 3.0 * z, Protocol::diabatic(), opts);
    const Trajectory traj = integrate(cfg);
    const double delta =
        extract_asymptote(traj, Basis::diabatic, 1).value - extract_asymptote(traj, Basis::diabatic, 2).value;
    const double estimate = freeze_estimate(z);
    const double ratio = delta / estimate;
    ok = ok && ratio >= 0.5 && ratio <= 2.0;
    detail += fmt::format("z={}: delta_rho {:.4f} vs exp(-z) {:.4f} (x{:.3f}); ", z, delta, estimate, ratio);
  }

  const auto dir = opts.artifact_dir.value_or(std::filesystem::temp_directory_path() / "lzmeas-acceptance");
  std::filesystem::create_directories(dir);
  const FigureOptions fo{opts.fast, opts.jobs};
  const auto a = zero_lambda_rows(read_csv_file(reproduce_figure(FigureId::fig3a, dir, fo)));
  const auto b = zero_lambda_rows(read_csv_file(reproduce_figure(FigureId::fig3b, dir, fo)));
  const bool edges = !a.empty() && a == b;
  detail += fmt::format("fig3a/3b lambda=0 edges {} ({} rows, in {})", edges ? "identical" : "differ", a.size(),
                        dir.string());
  return {ok && edges, detail};
}

struct Criterion {
  const char* name;
  std::function<Outcome(const AcceptanceOptions&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> table{
      {"LZ no-measurement limit", lz_limit},
      {"equal-population plateau", plateau},
      {"strong-measurement rate", strong_rate},
      {"adiabatic-protocol Zeno ordering", zeno_ordering},
      {"non-monotonicity near the adiabatic limit", nonmonotonic},
      {"Kraus/Lindblad oracle equivalence", oracle},
      {"basis consistency", basis_consistency},
      {"projective Zeno", projective_zeno},
      {"invariant suite", invariants},
      {"step-halving convergence", convergence},
      {"freeze estimate and survival surfaces", freeze},
  };
  return table;
}

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& opts) {
  if (id < 1 || id > kCriterionCount) throw std::out_of_range(fmt::format("no acceptance criterion {}", id));
  const Criterion& c = criteria()[static_cast<std::size_t>(id - 1)];
  CriterionResult r;
  r.id = id;
  r.name = c.name;
  const auto started = std::chrono::steady_clock::now();
  try {
    const Outcome o = c.run(opts);
    r.passed = o.passed;
    r.detail = o.detail;
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = fmt::format("error: {}", e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id, opts));
  return out;
}

std::string format_result(const CriterionResult& r) {
  return fmt::format("[{}] {:>2} {}: {} ({:.1f} s)", r.passed ? "PASS" : "FAIL", r.id, r.name, r.detail,
                     r.seconds);
}

}  // namespace lzmeas

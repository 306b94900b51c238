#include "lzmeas/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "lzmeas/io.hpp"

namespace lzmeas {

namespace {

const Sample& check_reaches_end(const Trajectory& traj) {
  if (traj.samples.empty()) throw std::invalid_argument("empty trajectory");
  const Sample& last = traj.samples.back();
  if (last.t < traj.window.t_end - 1e-9 * std::max(1.0, std::abs(traj.window.t_end)))
    throw std::invalid_argument("trajectory stops before its window end");
  return last;
}

double population(const Sample& s, Basis basis, int index) {
  if (basis == Basis::diabatic) return index == 1 ? s.p1_dia : s.p2_dia;
  return index == 1 ? s.p1_adi : s.p2_adi;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

Asymptote extract_asymptote(const Trajectory& traj, Basis basis, int index) {
  if (index != 1 && index != 2) throw std::invalid_argument("population index must be 1 or 2");
  check_reaches_end(traj);
  const double tail_start = traj.window.t_end - 0.1 * (traj.window.t_end - traj.window.t_start);
  double sum = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::size_t n = 0;
  for (const auto& s : traj.samples) {
    if (s.t < tail_start) continue;
    const double p = population(s, basis, index);
    sum += p;
    lo = std::min(lo, p);
    hi = std::max(hi, p);
    ++n;
  }
  return {sum / static_cast<double>(n), 0.5 * (hi - lo)};
}

double fit_decay_rate(const Trajectory& traj, double t0, double t1) {
  if (!(t1 > t0)) throw std::invalid_argument("fit_decay_rate: empty time window");
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  std::size_t n = 0;
  for (const auto& s : traj.samples) {
    if (s.t < t0 || s.t > t1) continue;
    const double diff = s.p1_dia - s.p2_dia;
    if (!(diff > 0.0))
      throw std::domain_error(fmt::format("fit_decay_rate: population difference {} at t={} is not positive", diff, s.t));
    const double y = std::log(diff);
    st += s.t;
    sy += y;
    stt += s.t * s.t;
    sty += s.t * y;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("fit_decay_rate: fewer than two samples in the window");
  const double dn = static_cast<double>(n);
  const double slope = (dn * sty - st * sy) / (dn * stt - st * st);
  return -slope;
}

void SweepSpec::validate() const {
  if (z_values.empty()) throw std::invalid_argument("sweep: empty z grid");
  if (lambda_values.empty()) throw std::invalid_argument("sweep: empty lambda grid");
  for (double z : z_values)
    if (!(z > 0.0) || !std::isfinite(z)) throw std::invalid_argument(fmt::format("sweep: invalid z {}", z));
  for (double l : lambda_values)
    if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument(fmt::format("sweep: invalid lambda {}", l));
  if (!(dt > 0.0)) throw std::invalid_argument("sweep: dt must be > 0");
  if (sample_stride < 1) throw std::invalid_argument("sweep: stride must be >= 1");
  if (window && !(window->t_start < window->t_end)) throw std::invalid_argument("sweep: empty window");
  if (jobs < 1) throw std::invalid_argument("sweep: jobs must be >= 1");
}

const SweepCell* SweepResult::find(double z, double lambda) const {
  for (const auto& c : cells)
    if (c.z == z && c.lambda == lambda) return &c;
  return nullptr;
}

int survival_index(Basis basis) { return basis == Basis::diabatic ? 1 : 2; }

SimConfig cell_config(const SweepSpec& spec, double z, double lambda) {
  SimConfig cfg;
  cfg.params = {z, lambda};
  cfg.protocol = (lambda == 0.0 && spec.protocol.is_sweep()) ? Protocol::diabatic() : spec.protocol;
  cfg.dt = spec.dt;
  cfg.sample_stride = spec.sample_stride;
  cfg.stepper = spec.stepper;
  cfg.gauge = spec.gauge;
  cfg.initial_kind = InitialState::diabatic_level_one;
  if (spec.window) {
    cfg.t_start = spec.window->t_start;
    cfg.t_end = spec.window->t_end;
    cfg.window_pinned = true;
  }
  return cfg;
}

namespace {

SweepCell run_cell(const SweepSpec& spec, double z, double lambda) {
  SweepCell cell{z, lambda, std::numeric_limits<double>::quiet_NaN(),
                 std::numeric_limits<double>::quiet_NaN(), false, lambda / z, {}};
  try {
    const SimConfig cfg = cell_config(spec, z, lambda);
    const Trajectory traj = integrate(cfg);
    const Asymptote a = extract_asymptote(traj, spec.report_basis, survival_index(spec.report_basis));
    cell.survival = a.value;
    cell.spread = a.spread;
    cell.converged = traj.window_converged;
    if (spec.protocol.is_sweep() && lambda > 0.0 && lambda / z > 0.25 * traj.window.t_end)
      cell.converged = false;
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

SweepResult sweep(const SweepSpec& spec) {
  spec.validate();
  const auto zs = sorted_unique(spec.z_values);
  const auto ls = sorted_unique(spec.lambda_values);
  const std::size_t total = zs.size() * ls.size();

  SweepResult result;
  result.cells.resize(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++)
      result.cells[i] = run_cell(spec, zs[i / ls.size()], ls[i % ls.size()]);
  };
  const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(spec.jobs, total));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(worker);
  }
  return result;
}

std::optional<Dip> find_dip(std::span<const double> lambdas, std::span<const double> survival,
                            double tolerance) {
  if (lambdas.size() != survival.size()) throw std::invalid_argument("find_dip: size mismatch");
  if (survival.size() < 2) return std::nullopt;
  const auto min_it = std::min_element(survival.begin() + 1, survival.end());
  const double depth = survival.front() - *min_it;
  if (!(depth > tolerance)) return std::nullopt;
  return Dip{lambdas[static_cast<std::size_t>(min_it - survival.begin())], depth};
}

std::optional<Dip> find_nonmonotonicity(double z, std::span<const double> lambda_grid, double tolerance,
                                        unsigned jobs) {
  SweepSpec spec;
  spec.z_values = {z};
  spec.lambda_values.assign(lambda_grid.begin(), lambda_grid.end());
  spec.protocol = Protocol::adiabatic();
  spec.report_basis = Basis::adiabatic;
  spec.jobs = jobs;
  const SweepResult res = sweep(spec);
  std::vector<double> ls, surv;
  for (const auto& c : res.cells) {
    ls.push_back(c.lambda);
    surv.push_back(c.survival);
  }
  return find_dip(ls, surv, tolerance);
}

std::vector<double> log_space(double lo, double hi, int n) {
  if (n < 1 || !(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("log_space: bad range");
  std::vector<double> out;
  if (n == 1) return {lo};
  const double step = (std::log(hi) - std::log(lo)) / (n - 1);
  for (int i = 0; i < n; ++i) out.push_back(std::exp(std::log(lo) + step * i));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::string figure_name(FigureId id) {
  switch (id) {
    case FigureId::fig1a: return "1a";
    case FigureId::fig1b: return "1b";
    case FigureId::fig1c: return "1c";
    case FigureId::fig2a: return "2a";
    case FigureId::fig2b: return "2b";
    case FigureId::fig2c: return "2c";
    case FigureId::fig3a: return "3a";
    case FigureId::fig3b: return "3b";
  }
  return "?";
}

FigureId parse_figure(std::string_view name) {
  for (FigureId id : all_figures())
    if (name == figure_name(id) || name == "fig" + figure_name(id)) return id;
  throw std::invalid_argument(fmt::format("unknown figure '{}'", name));
}

std::vector<FigureId> all_figures() {
  return {FigureId::fig1a, FigureId::fig1b, FigureId::fig1c, FigureId::fig2a,
          FigureId::fig2b, FigureId::fig2c, FigureId::fig3a, FigureId::fig3b};
}

FigurePlan figure_plan(FigureId id, const FigureOptions& opts) {
  const std::vector<double> fig1_lambdas{0.0, 0.2, 0.5, 1.0, 2.0, 5.0};
  const std::vector<double> fig2_lambdas{0.0, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0};
  const Window wide{-200.0, 200.0};
  const Window fig2_window{-100.0, 100.0};
  switch (id) {
    case FigureId::fig1a: return {Protocol::adiabatic(), {0.05}, fig1_lambdas, wide, true};
    case FigureId::fig1b: return {Protocol::adiabatic(), {0.5}, fig1_lambdas, wide, true};
    case FigureId::fig1c:
      return {Protocol::adiabatic(), {0.05, 0.5, 5.0}, {0.0, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0}, wide, false};
    case FigureId::fig2a: return {Protocol::diabatic(), {0.05}, fig2_lambdas, fig2_window, true};
    case FigureId::fig2b: return {Protocol::diabatic(), {0.5}, fig2_lambdas, fig2_window, true};
    case FigureId::fig2c: return {Protocol::diabatic(), {5.0}, fig2_lambdas, fig2_window, true};
    case FigureId::fig3a:
    case FigureId::fig3b: {
      const int n = opts.fast ? 10 : 20;
      std::vector<double> lambdas{0.0};
      for (double l : log_space(0.01, 50.0, n)) lambdas.push_back(l);
      const Protocol p = id == FigureId::fig3a ? Protocol::adiabatic() : Protocol::diabatic();
      return {p, log_space(0.02, 5.0, n), lambdas, wide, false};
    }
  }
  throw std::invalid_argument("unknown figure");
}

std::filesystem::path reproduce_figure(FigureId id, const std::filesystem::path& out_dir,
                                       const FigureOptions& opts) {
  const auto started = std::chrono::steady_clock::now();
  const FigurePlan plan = figure_plan(id, opts);
  const double dt = opts.fast ? 0.01 : 0.005;
  const std::string name = "fig" + figure_name(id);
  const auto csv_path = out_dir / (name + ".csv");

  ManifestInfo info;
  info.command = "figure";
  info.config = {{"fig", figure_name(id)}, {"fast", opts.fast}};
  info.stepper = stepper_name(Stepper::magnus4);
  info.dt = dt;

  std::ostringstream csv;
  if (plan.time_series) {
    csv << "lambda," << kTrajectoryHeader << '\n';
    InvariantSummary worst;
    for (double lambda : plan.lambda_values) {
      SimConfig cfg;
      cfg.params = {plan.z_values.front(), lambda};
      cfg.protocol = plan.protocol;
      cfg.t_start = plan.window.t_start;
      cfg.t_end = plan.window.t_end;
      cfg.window_pinned = true;
      cfg.dt = dt;
      cfg.sample_stride = opts.fast ? 10 : 20;
      const Trajectory traj = integrate(cfg);
      for (const auto& w : traj.warnings) info.warnings.push_back(fmt::format("lambda={}: {}", lambda, w));
      const auto inv = summarize_invariants(traj);
      worst.max_trace_error = std::max(worst.max_trace_error, inv.max_trace_error);
      worst.min_eigenvalue = std::min(worst.min_eigenvalue, inv.min_eigenvalue);
      worst.max_population_sum_error = std::max(worst.max_population_sum_error, inv.max_population_sum_error);
      if (lambda > 0.0) worst.max_purity_increase = std::max(worst.max_purity_increase, inv.max_purity_increase);
      write_trajectory_block(csv, lambda, traj);
    }
    info.invariants = invariants_to_json(worst);
  } else {
    SweepSpec spec;
    spec.z_values = plan.z_values;
    spec.lambda_values = plan.lambda_values;
    spec.protocol = plan.protocol;
    spec.window = plan.window;
    spec.dt = dt;
    spec.sample_stride = 50;
    spec.report_basis = Basis::adiabatic;
    spec.jobs = opts.jobs;
    const SweepResult res = sweep(spec);
    for (const auto& c : res.cells)
      if (!c.error.empty()) info.warnings.push_back(fmt::format("z={} lambda={}: {}", c.z, c.lambda, c.error));
    write_sweep_csv(csv, res);
  }
  write_text_file(csv_path, csv.str());
  info.outputs = {csv_path.filename().string()};
  info.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_text_file(out_dir / (name + ".manifest.json"), make_manifest(info).dump(2) + "\n");
  return csv_path;
}

}  // namespace lzmeas

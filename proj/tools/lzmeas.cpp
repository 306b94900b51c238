// lzmeas: Landau-Zener sweeps under continuous weak measurement.
//
// Exit codes: 0 ok, 1 failure (validate) or unexpected error, 2 invalid
// flags or input, 3 integration abort or total sweep failure, 4 oracle
// tolerance breach.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "lzmeas/acceptance.hpp"
#include "lzmeas/dynamics.hpp"
#include "lzmeas/experiments.hpp"
#include "lzmeas/io.hpp"
#include "lzmeas/kraus.hpp"
#include "lzmeas/plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lzmeas;

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kAbort = 3, kOracleBreach = 4 };

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path manifest_path(const fs::path& out) {
  fs::path p = out;
  return p.replace_extension(".manifest.json");
}

// One --flag per key of a defaults object. Values given on the command line
// override a --config file, which overrides the defaults.
class OptionSet {
 public:
  OptionSet(CLI::App* cmd, json defaults) : defaults_(std::move(defaults)) {
    for (const auto& [key, value] : defaults_.items()) {
      if (value.is_boolean()) {
        cmd->add_flag("--" + key, flags_[key], fmt::format("(default {})", value.dump()));
      } else {
        cmd->add_option("--" + key, text_[key], fmt::format("(default {})", value.dump()));
      }
      options_[key] = cmd->get_option("--" + key);
    }
    cmd->add_option("--config", config_file_, "JSON file of flag values (a run manifest also works)");
  }

  json resolve() const {
    json opts = defaults_;
    if (!config_file_.empty()) {
      json file;
      try {
        file = json::parse(read_text_file(config_file_));
      } catch (const std::exception& e) {
        throw UsageError(fmt::format("--config: {}", e.what()));
      }
      if (file.contains("config") && file.contains("tool")) file = file["config"];
      if (!file.is_object()) throw UsageError("--config: expected a JSON object");
      for (const auto& [key, value] : file.items()) {
        if (!defaults_.contains(key)) throw UsageError(fmt::format("--config: unknown option '{}'", key));
        opts[key] = value;
      }
    }
    for (const auto& [key, opt] : options_) {
      if (opt->count() == 0) continue;
      const json& def = defaults_[key];
      if (def.is_boolean()) {
        opts[key] = flags_.at(key);
      } else if (def.is_number()) {
        try {
          opts[key] = parse_double(text_.at(key));
        } catch (const std::invalid_argument&) {
          throw UsageError(fmt::format("--{}: '{}' is not a number", key, text_.at(key)));
        }
      } else {
        opts[key] = text_.at(key);
      }
    }
    return opts;
  }

 private:
  json defaults_;
  std::map<std::string, std::string> text_;
  std::map<std::string, bool> flags_;
  std::map<std::string, CLI::Option*> options_;
  std::string config_file_;
};

std::vector<double> parse_list(const std::string& flag, const std::string& text) {
  try {
    return parse_grid(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(fmt::format("--{}: {}", flag, e.what()));
  }
}

int run_simulate(const OptionSet& options, const fs::path& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const json opts = options.resolve();
  SimConfig cfg;
  try {
    cfg = sim_config_from_options(opts);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Trajectory traj = integrate(cfg);
  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  write_text_file(out, csv.str());

  ManifestInfo info;
  info.command = "simulate";
  info.config = opts;
  info.stepper = stepper_name(cfg.stepper);
  info.dt = cfg.dt;
  info.invariants = invariants_to_json(summarize_invariants(traj));
  info.outputs = {out.filename().string()};
  info.warnings = traj.warnings;
  info.wall_seconds = seconds_since(t0);
  write_text_file(manifest_path(out), make_manifest(info).dump(2) + "\n");
  for (const auto& w : traj.warnings) fmt::print(stderr, "warning: {}\n", w);
  return kOk;
}

int run_sweep(const OptionSet& options, const fs::path& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const json opts = options.resolve();
  SweepSpec spec;
  try {
    spec = sweep_spec_from_options(opts);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const SweepResult res = sweep(spec);
  std::ostringstream csv;
  write_sweep_csv(csv, res);
  write_text_file(out, csv.str());

  ManifestInfo info;
  info.command = "sweep";
  info.config = opts;
  info.stepper = stepper_name(spec.stepper);
  info.dt = spec.dt;
  std::size_t failed = 0, unconverged = 0;
  for (const auto& c : res.cells) {
    if (!c.error.empty()) {
      ++failed;
      info.warnings.push_back(fmt::format("z={} lambda={}: {}", c.z, c.lambda, c.error));
    } else if (!c.converged) {
      ++unconverged;
    }
  }
  info.invariants = json{{"cells", res.cells.size()}, {"failed", failed}, {"unconverged", unconverged}};
  info.outputs = {out.filename().string()};
  info.wall_seconds = seconds_since(t0);
  write_text_file(manifest_path(out), make_manifest(info).dump(2) + "\n");
  for (const auto& w : info.warnings) fmt::print(stderr, "warning: {}\n", w);
  if (failed == res.cells.size()) {
    fmt::print(stderr, "error: every sweep cell failed\n");
    return kAbort;
  }
  return kOk;
}

struct OracleArgs {
  double z = 0.5;
  double lambda = 1.0;
  std::string protocol = "diabatic";
  std::string dt_meas = "1e-3,5e-4";
  std::string window = "-20,20";
  double ref_dt = 0.001;
  double tolerance = 1e-3;
  bool zeno = false;
  double coupling = 1.0;
  double total_time = 1.0;
  std::string n_list = "10,100,1000";
  std::string out;
};

int run_oracle(const OracleArgs& a) {
  std::ostringstream table;
  bool ok = true;
  if (a.zeno) {
    if (!(a.total_time > 0.0)) throw UsageError("--T: must be > 0");
    table << "N,simulated,formula,abs_error\n";
    for (double n : parse_list("N-list", a.n_list)) {
      if (n < 1 || n != std::floor(n)) throw UsageError(fmt::format("--N-list: bad count {}", n));
      const int count = static_cast<int>(n);
      const double sim = projective_zeno_simulate(a.coupling, a.total_time, count);
      const double formula = zeno_projective_survival(a.coupling, a.total_time, count);
      const double err = std::abs(sim - formula);
      ok = ok && err <= a.tolerance;
      table << count << ',' << format_double(sim) << ',' << format_double(formula) << ',' << format_double(err)
            << '\n';
    }
  } else {
    const auto window = parse_list("window", a.window);
    if (window.size() != 2) throw UsageError("--window: expected 'start,end'");
    json opts{{"z", a.z},           {"lambda", a.lambda},     {"protocol", a.protocol},
              {"t-start", window[0]}, {"t-end", window[1]}, {"pin-window", true},
              {"dt", a.ref_dt},     {"stride", 1000000000},  {"stepper", "rk4"}};
    SimConfig cfg;
    try {
      cfg = sim_config_from_options(opts);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    const Mat2 reference = integrate(cfg).samples.back().rho.matrix();
    table << "dt_meas,max_error\n";
    for (double dt : parse_list("dt-meas", a.dt_meas)) {
      if (!(dt > 0.0)) throw UsageError(fmt::format("--dt-meas: bad step {}", dt));
      Trajectory traj;
      try {
        traj = discrete_propagate(cfg, dt);
      } catch (const std::invalid_argument& e) {
        throw UsageError(fmt::format("--dt-meas: {}", e.what()));
      }
      const double err = (traj.samples.back().rho.matrix() - reference).max_abs();
      ok = ok && err <= a.tolerance;
      table << format_double(dt) << ',' << format_double(err) << '\n';
    }
  }
  std::cout << table.str();
  if (!a.out.empty()) write_text_file(a.out, table.str());
  if (!ok) {
    fmt::print(stderr, "oracle: error exceeds tolerance {}\n", a.tolerance);
    return kOracleBreach;
  }
  return kOk;
}

struct ValidateArgs {
  bool fast = false;
  unsigned jobs = 1;
  std::string artifacts;
  std::vector<int> criteria;
  bool corrupt_gauge = false;
};

int run_validate(const ValidateArgs& a) {
  AcceptanceOptions opts;
  opts.fast = a.fast;
  opts.jobs = a.jobs;
  opts.gauge = a.corrupt_gauge ? GaugeSign::inverted : GaugeSign::standard;
  if (!a.artifacts.empty()) opts.artifact_dir = fs::path(a.artifacts);
  std::vector<int> ids = a.criteria;
  if (ids.empty())
    for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
  int failed = 0;
  for (int id : ids) {
    if (id < 1 || id > kCriterionCount) throw UsageError(fmt::format("--criterion: no criterion {}", id));
    const auto r = run_criterion(id, opts);
    fmt::print("{}\n", format_result(r));
    std::fflush(stdout);
    failed += r.passed ? 0 : 1;
  }
  fmt::print("{} of {} criteria passed\n", ids.size() - static_cast<std::size_t>(failed), ids.size());
  return failed == 0 ? kOk : kFailure;
}

int run_plot(const std::string& in, const std::string& kind, const std::string& out, const PlotOptions& po) {
  PlotKind k;
  try {
    k = parse_plot_kind(kind);
  } catch (const std::invalid_argument& e) {
    throw UsageError(fmt::format("--kind: {}", e.what()));
  }
  std::string svg;
  try {
    svg = render_svg(read_csv_file(in), k, po);
  } catch (const CsvError& e) {
    throw UsageError(fmt::format("{}: {}", in, e.what()));
  }
  write_text_file(out, svg);
  return kOk;
}

PlotOptions figure_plot_options(FigureId id) {
  switch (id) {
    case FigureId::fig1a:
    case FigureId::fig1b: return {"p2_adi", "fig" + figure_name(id) + ": adiabatic ground-state population"};
    case FigureId::fig2a:
    case FigureId::fig2b:
    case FigureId::fig2c: return {"p1_dia", "fig" + figure_name(id) + ": diabatic level-1 population"};
    default: return {"", "fig" + figure_name(id) + ": asymptotic adiabatic survival"};
  }
}

PlotKind figure_plot_kind(FigureId id) {
  if (figure_plan(id, {}).time_series) return PlotKind::timeseries;
  if (id == FigureId::fig1c) return PlotKind::asymptote;
  return PlotKind::surface;
}

int run_figure(const std::string& fig, const std::string& out_dir, bool fast, unsigned jobs, bool plot) {
  std::vector<FigureId> ids;
  if (fig == "all") {
    ids = all_figures();
  } else {
    try {
      ids = {parse_figure(fig)};
    } catch (const std::invalid_argument& e) {
      throw UsageError(fmt::format("--fig: {}", e.what()));
    }
  }
  fs::create_directories(out_dir);
  for (FigureId id : ids) {
    const fs::path csv = reproduce_figure(id, out_dir, {fast, jobs});
    fmt::print("{}\n", csv.string());
    if (plot) {
      fs::path svg = csv;
      svg.replace_extension(".svg");
      write_text_file(svg, render_svg(read_csv_file(csv), figure_plot_kind(id), figure_plot_options(id)));
      fmt::print("{}\n", svg.string());
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landau-Zener dynamics under continuous weak measurement"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Integrate one trajectory and write CSV + manifest");
  OptionSet sim_opts(sim, sim_options_defaults());
  std::string sim_out = "trajectory.csv";
  sim->add_option("--out", sim_out, "Trajectory CSV path");

  auto* swp = app.add_subcommand("sweep", "Asymptotic survival over a z x lambda grid");
  OptionSet sweep_opts(swp, sweep_options_defaults());
  std::string sweep_out = "sweep.csv";
  swp->add_option("--out", sweep_out, "Sweep CSV path");

  auto* orc = app.add_subcommand("oracle", "Compare discrete Kraus propagation with the master equation");
  OracleArgs oa;
  orc->add_option("--z", oa.z);
  orc->add_option("--lambda", oa.lambda);
  orc->add_option("--protocol", oa.protocol);
  orc->add_option("--dt-meas", oa.dt_meas, "Comma list of measurement intervals");
  orc->add_option("--window", oa.window, "start,end");
  orc->add_option("--ref-dt", oa.ref_dt, "Step of the RK4 reference run");
  orc->add_option("--tolerance", oa.tolerance, "Largest acceptable error");
  orc->add_flag("--zeno", oa.zeno, "Projective Zeno check instead");
  orc->add_option("--V", oa.coupling, "Zeno: coupling");
  orc->add_option("--T", oa.total_time, "Zeno: total time");
  orc->add_option("--N-list", oa.n_list, "Zeno: comma list of measurement counts");
  orc->add_option("--out", oa.out, "Also write the table here");

  auto* val = app.add_subcommand("validate", "Run the acceptance criteria");
  ValidateArgs va;
  val->add_flag("--fast", va.fast, "Thinner grids");
  val->add_option("--jobs", va.jobs)->check(CLI::PositiveNumber);
  val->add_option("--artifacts", va.artifacts, "Directory for the surface artifacts");
  val->add_option("--criterion", va.criteria, "Run only these criteria");
  val->add_flag("--corrupt-gauge", va.corrupt_gauge)->group("");

  auto* plt = app.add_subcommand("plot", "Render a CSV dataset as SVG");
  std::string plot_in, plot_kind, plot_out;
  PlotOptions po;
  plt->add_option("--in", plot_in)->required();
  plt->add_option("--kind", plot_kind, "timeseries | asymptote | surface")->required();
  plt->add_option("--out", plot_out)->required();
  plt->add_option("--column", po.column, "timeseries: population column");
  plt->add_option("--title", po.title);

  auto* fig = app.add_subcommand("figure", "Regenerate a figure dataset");
  std::string fig_name = "all", fig_dir = "figures";
  bool fig_fast = false, fig_plot = false;
  unsigned fig_jobs = 1;
  fig->add_option("--fig", fig_name, "1a .. 3b, or all");
  fig->add_option("--out-dir", fig_dir);
  fig->add_flag("--fast", fig_fast);
  fig->add_option("--jobs", fig_jobs)->check(CLI::PositiveNumber);
  fig->add_flag("--plot", fig_plot, "Also write an SVG next to each CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*sim) return run_simulate(sim_opts, sim_out);
    if (*swp) return run_sweep(sweep_opts, sweep_out);
    if (*orc) return run_oracle(oa);
    if (*val) return run_validate(va);
    if (*plt) return run_plot(plot_in, plot_kind, plot_out, po);
    if (*fig) return run_figure(fig_name, fig_dir, fig_fast, fig_jobs, fig_plot);
  } catch (const UsageError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  } catch (const IntegrationAbort& e) {
    fmt::print(stderr, "integration aborted: {}\n", e.what());
    return kAbort;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kFailure;
  }
  return kFailure;
}

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lzmeas/acceptance.hpp"
#include "lzmeas/experiments.hpp"
#include "lzmeas/io.hpp"
#include "lzmeas/kraus.hpp"
#include "lzmeas/plot.hpp"

namespace py = pybind11;
using namespace lzmeas;

namespace {

// Python keyword names use underscores where the flags use dashes.
nlohmann::json options_from_kwargs(const py::kwargs& kwargs) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [k, v] : kwargs) {
    std::string key = py::cast<std::string>(k);
    for (char& c : key)
      if (c == '_') c = '-';
    if (key == "lambda-") key = "lambda";
    if (py::isinstance<py::bool_>(v))
      out[key] = v.cast<bool>();
    else if (py::isinstance<py::int_>(v))
      out[key] = v.cast<long long>();
    else if (py::isinstance<py::float_>(v))
      out[key] = v.cast<double>();
    else if (py::isinstance<py::str>(v))
      out[key] = v.cast<std::string>();
    else
      throw py::type_error("unsupported value for option '" + key + "'");
  }
  return out;
}

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict trajectory_dict(const Trajectory& traj) {
  std::vector<double> cols[8];
  for (const Sample& s : traj.samples) {
    const double values[8] = {s.t,      s.p1_dia, s.p2_dia, s.p1_adi, s.p2_adi, s.coherence.real(),
                              s.coherence.imag(), purity(s.rho)};
    for (int c = 0; c < 8; ++c) cols[c].push_back(values[c]);
  }
  static const char* const names[8] = {"t",      "p1_dia",   "p2_dia",   "p1_adi",
                                       "p2_adi", "re_rho12", "im_rho12", "purity"};
  py::dict d;
  for (int c = 0; c < 8; ++c) d[names[c]] = to_array(cols[c]);
  d["warnings"] = traj.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Landau-Zener dynamics under continuous weak measurement";
  m.attr("__version__") = kToolVersion;

  py::register_exception<IntegrationAbort>(m, "IntegrationAbort", PyExc_RuntimeError);
  py::register_exception<CsvError>(m, "CsvError", PyExc_ValueError);

  m.def("lz_survival_probability", &lz_survival_probability, py::arg("z"));
  m.def("zeno_projective_survival", &zeno_projective_survival, py::arg("coupling"), py::arg("total_time"),
        py::arg("n"));
  m.def("projective_zeno_simulate", &projective_zeno_simulate, py::arg("coupling"), py::arg("total_time"),
        py::arg("n"));
  m.def("strong_measurement_rate", &strong_measurement_rate, py::arg("z"), py::arg("lambda_"), py::arg("t") = 0.0);
  m.def("freeze_estimate", &freeze_estimate, py::arg("z"));

  m.def(
      "simulate",
      [](const py::kwargs& kwargs) {
        const SimConfig cfg = sim_config_from_options(options_from_kwargs(kwargs));
        Trajectory traj;
        {
          py::gil_scoped_release release;
          traj = integrate(cfg);
        }
        return trajectory_dict(traj);
      },
      "Integrate one trajectory. Keywords mirror the CLI flags (z, lambda_, protocol, t_start, ...).");

  m.def(
      "sweep",
      [](const py::kwargs& kwargs) {
        const SweepSpec spec = sweep_spec_from_options(options_from_kwargs(kwargs));
        SweepResult res;
        {
          py::gil_scoped_release release;
          res = sweep(spec);
        }
        py::list cells;
        for (const auto& c : res.cells) {
          py::dict d;
          d["z"] = c.z;
          d["lambda"] = c.lambda;
          d["survival"] = c.survival;
          d["spread"] = c.spread;
          d["converged"] = c.converged;
          d["error"] = c.error;
          cells.append(d);
        }
        return cells;
      },
      "Asymptotic survival over a grid. Keywords mirror the sweep flags (z_grid, lambda_grid, ...).");

  m.def(
      "oracle_error",
      [](double z, double lambda, double dt_meas, double t_start, double t_end) {
        py::gil_scoped_release release;
        SimConfig cfg;
        cfg.params = {z, lambda};
        cfg.t_start = t_start;
        cfg.t_end = t_end;
        cfg.window_pinned = true;
        cfg.sample_stride = 1 << 30;
        SimConfig ref = cfg;
        ref.stepper = Stepper::rk4;
        ref.dt = 0.001;
        const Mat2 a = discrete_propagate(cfg, dt_meas).samples.back().rho.matrix();
        return (a - integrate(ref).samples.back().rho.matrix()).max_abs();
      },
      py::arg("z"), py::arg("lambda_"), py::arg("dt_meas"), py::arg("t_start") = -20.0, py::arg("t_end") = 20.0);

  m.def(
      "run_criterion",
      [](int id, bool fast) {
        CriterionResult r;
        {
          py::gil_scoped_release release;
          AcceptanceOptions opts;
          opts.fast = fast;
          r = run_criterion(id, opts);
        }
        py::dict d;
        d["id"] = r.id;
        d["name"] = r.name;
        d["passed"] = r.passed;
        d["detail"] = r.detail;
        d["seconds"] = r.seconds;
        return d;
      },
      py::arg("id"), py::arg("fast") = false);

  m.def(
      "reproduce_figure",
      [](const std::string& name, const std::string& out_dir, bool fast) {
        const FigureId id = parse_figure(name);
        py::gil_scoped_release release;
        return reproduce_figure(id, out_dir, {fast, 1}).string();
      },
      py::arg("name"), py::arg("out_dir"), py::arg("fast") = false);

  m.def(
      "render_svg",
      [](const std::string& csv_path, const std::string& kind, const std::string& column) {
        return render_svg(read_csv_file(csv_path), parse_plot_kind(kind), {column, ""});
      },
      py::arg("csv_path"), py::arg("kind"), py::arg("column") = "");
}

#include "lzmeas/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace lzmeas {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || first == last)
    throw std::invalid_argument(fmt::format("'{}' is not a number", s));
  return v;
}

namespace {

void write_row(std::ostream& out, const Sample& s) {
  out << format_double(s.t) << ',' << format_double(s.p1_dia) << ',' << format_double(s.p2_dia) << ','
      << format_double(s.p1_adi) << ',' << format_double(s.p2_adi) << ','
      << format_double(s.coherence.real()) << ',' << format_double(s.coherence.imag()) << ','
      << format_double(purity(s.rho)) << '\n';
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << kTrajectoryHeader << '\n';
  for (const auto& s : traj.samples) write_row(out, s);
}

void write_trajectory_block(std::ostream& out, double lambda, const Trajectory& traj) {
  for (const auto& s : traj.samples) {
    out << format_double(lambda) << ',';
    write_row(out, s);
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << kSweepHeader << '\n';
  for (const auto& c : result.cells)
    out << format_double(c.z) << ',' << format_double(c.lambda) << ',' << format_double(c.survival) << ','
        << format_double(c.spread) << ',' << (c.converged ? "true" : "false") << '\n';
}

CsvError::CsvError(std::size_t line, const std::string& what)
    : std::runtime_error(fmt::format("line {}: {}", line, what)), line_(line) {}

bool CsvTable::has_column(const std::string& name) const {
  for (const auto& h : header)
    if (h == name) return true;
  return false;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw CsvError(1, fmt::format("missing column '{}'", name));
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  try {
    return parse_double(rows.at(row).at(col));
  } catch (const std::invalid_argument& e) {
    throw CsvError(lines.at(row), fmt::format("column '{}': {}", header.at(col), e.what()));
  }
}

CsvTable parse_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size())
      throw CsvError(lineno, fmt::format("expected {} fields, got {}", t.header.size(), fields.size()));
    t.rows.push_back(std::move(fields));
    t.lines.push_back(lineno);
  }
  if (t.header.empty()) throw CsvError(1, "missing header");
  return t;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  return parse_csv(in);
}

std::string emit_csv(const CsvTable& table) {
  std::ostringstream out;
  auto emit_fields = [&](const std::vector<std::string>& fields, bool numeric) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      if (!numeric) {
        out << fields[i];
        continue;
      }
      try {
        out << format_double(parse_double(fields[i]));
      } catch (const std::invalid_argument&) {
        out << fields[i];
      }
    }
    out << '\n';
  };
  emit_fields(table.header, false);
  for (const auto& row : table.rows) emit_fields(row, true);
  return out.str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

namespace {

void reject_unknown_keys(const json& opts, const json& defaults) {
  for (const auto& [key, _] : opts.items())
    if (!defaults.contains(key)) throw std::invalid_argument(fmt::format("unknown option '{}'", key));
}

double get_number(const json& opts, const char* key) {
  const auto& v = opts.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_double(v.get<std::string>());
    } catch (const std::invalid_argument&) {
    }
  }
  throw std::invalid_argument(fmt::format("--{}: expected a number", key));
}

std::string get_string(const json& opts, const char* key) {
  const auto& v = opts.at(key);
  if (!v.is_string()) throw std::invalid_argument(fmt::format("--{}: expected a string", key));
  return v.get<std::string>();
}

bool get_bool(const json& opts, const char* key) {
  const auto& v = opts.at(key);
  if (!v.is_boolean()) throw std::invalid_argument(fmt::format("--{}: expected true or false", key));
  return v.get<bool>();
}

int get_int(const json& opts, const char* key) {
  const double v = get_number(opts, key);
  if (v != std::floor(v)) throw std::invalid_argument(fmt::format("--{}: expected an integer", key));
  return static_cast<int>(v);
}

// Rethrow configuration errors with the flag that caused them.
template <class F>
void checked(const char* flag, F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    if (msg.rfind("--", 0) == 0) throw;
    throw std::invalid_argument(fmt::format("--{}: {}", flag, msg));
  }
}

}  // namespace

json sim_options_defaults() {
  return json{{"z", 0.5},        {"lambda", 0.0},       {"protocol", "diabatic"},
              {"t-start", -200.0}, {"t-end", 200.0},    {"pin-window", false},
              {"dt", 0.005},      {"delta-epsilon", 0.0}, {"stride", 20},
              {"stepper", "magnus4"}, {"initial", "default"}};
}

SimConfig sim_config_from_options(const json& in) {
  json opts = sim_options_defaults();
  reject_unknown_keys(in, opts);
  opts.update(in);

  SimConfig cfg;
  cfg.params.z = get_number(opts, "z");
  cfg.params.lambda = get_number(opts, "lambda");
  cfg.t_start = get_number(opts, "t-start");
  cfg.t_end = get_number(opts, "t-end");
  cfg.window_pinned = get_bool(opts, "pin-window");
  cfg.dt = get_number(opts, "dt");
  cfg.sample_stride = get_int(opts, "stride");
  const double de = get_number(opts, "delta-epsilon");
  checked("protocol", [&] { cfg.protocol = parse_protocol(get_string(opts, "protocol"), de); });
  checked("stepper", [&] { cfg.stepper = parse_stepper(get_string(opts, "stepper")); });
  const std::string initial = get_string(opts, "initial");
  if (initial == "default")
    cfg.initial_kind = InitialState::protocol_default;
  else if (initial == "diabatic-level-one")
    cfg.initial_kind = InitialState::diabatic_level_one;
  else
    throw std::invalid_argument(fmt::format("--initial: unknown value '{}'", initial));

  checked("z", [&] { if (!(cfg.params.z > 0.0)) throw std::invalid_argument("must be > 0"); });
  checked("lambda", [&] { if (!(cfg.params.lambda >= 0.0)) throw std::invalid_argument("must be >= 0"); });
  checked("dt", [&] {
    if (!(cfg.dt >= kMinDt && cfg.dt <= kMaxDt))
      throw std::invalid_argument(fmt::format("must lie in [{}, {}]", kMinDt, kMaxDt));
  });
  checked("stride", [&] { if (cfg.sample_stride < 1) throw std::invalid_argument("must be >= 1"); });
  checked("t-end", [&] {
    if (!(cfg.t_start < cfg.t_end)) throw std::invalid_argument("must exceed --t-start");
  });
  checked("dt", [&] { step_count(resolve_window(cfg), cfg.dt); });
  cfg.validate();
  return cfg;
}

json sweep_options_defaults() {
  return json{{"z-grid", "0.05,0.5,5"}, {"lambda-grid", "0,0.5,5"}, {"protocol", "adiabatic"},
              {"t-start", -200.0},     {"t-end", 200.0},           {"pin-window", false},
              {"dt", 0.005},           {"stride", 20},             {"report-basis", "adiabatic"},
              {"stepper", "magnus4"},  {"jobs", 1}};
}

SweepSpec sweep_spec_from_options(const json& in) {
  json opts = sweep_options_defaults();
  reject_unknown_keys(in, opts);
  opts.update(in);

  SweepSpec spec;
  checked("z-grid", [&] { spec.z_values = parse_grid(get_string(opts, "z-grid")); });
  checked("lambda-grid", [&] { spec.lambda_values = parse_grid(get_string(opts, "lambda-grid")); });
  checked("protocol", [&] { spec.protocol = parse_protocol(get_string(opts, "protocol")); });
  checked("stepper", [&] { spec.stepper = parse_stepper(get_string(opts, "stepper")); });
  spec.dt = get_number(opts, "dt");
  checked("dt", [&] {
    if (!(spec.dt >= kMinDt && spec.dt <= kMaxDt))
      throw std::invalid_argument(fmt::format("must lie in [{}, {}]", kMinDt, kMaxDt));
  });
  spec.sample_stride = get_int(opts, "stride");
  const int jobs = get_int(opts, "jobs");
  if (jobs < 1) throw std::invalid_argument("--jobs: must be >= 1");
  spec.jobs = static_cast<unsigned>(jobs);
  if (get_bool(opts, "pin-window")) spec.window = Window{get_number(opts, "t-start"), get_number(opts, "t-end")};
  const std::string basis = get_string(opts, "report-basis");
  if (basis == "adiabatic")
    spec.report_basis = Basis::adiabatic;
  else if (basis == "diabatic")
    spec.report_basis = Basis::diabatic;
  else
    throw std::invalid_argument(fmt::format("--report-basis: unknown basis '{}'", basis));
  spec.validate();
  return spec;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.rfind("log:", 0) == 0) {
    std::vector<std::string> parts;
    std::istringstream ss(text.substr(4));
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() != 3) throw std::invalid_argument(fmt::format("bad grid '{}': expected log:lo:hi:n", text));
    const double lo = parse_double(parts[0]);
    const double hi = parse_double(parts[1]);
    const double n = parse_double(parts[2]);
    if (!(lo > 0.0) || !(hi >= lo) || n < 1 || n != std::floor(n))
      throw std::invalid_argument(fmt::format("bad grid '{}'", text));
    return log_space(lo, hi, static_cast<int>(n));
  }
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  if (out.empty()) throw std::invalid_argument("empty grid");
  return out;
}

json invariants_to_json(const InvariantSummary& s) {
  return json{{"max_trace_error", s.max_trace_error},
              {"min_eigenvalue", s.min_eigenvalue},
              {"max_purity_increase", s.max_purity_increase},
              {"max_purity_deviation", s.max_purity_deviation},
              {"max_population_sum_error", s.max_population_sum_error}};
}

json make_manifest(const ManifestInfo& info) {
  return json{{"tool", "lzmeas"},
              {"version", kToolVersion},
              {"command", info.command},
              {"config", info.config},
              {"integrator", {{"stepper", info.stepper}, {"dt", info.dt}}},
              {"wall_seconds", info.wall_seconds},
              {"invariants", info.invariants},
              {"outputs", info.outputs},
              {"warnings", info.warnings}};
}

}  // namespace lzmeas

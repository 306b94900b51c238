#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lzmeas/dynamics.hpp"
#include "lzmeas/experiments.hpp"

namespace lzmeas {

inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr const char* kTrajectoryHeader = "t,p1_dia,p2_dia,p1_adi,p2_adi,re_rho12,im_rho12,purity";
inline constexpr const char* kSweepHeader = "z,lambda,survival,spread,converged";

// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);
double parse_double(const std::string& s);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
// Long format with a leading `lambda` column, one block per trajectory.
void write_trajectory_block(std::ostream& out, double lambda, const Trajectory& traj);
void write_sweep_csv(std::ostream& out, const SweepResult& result);

class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // source line of each row

  bool has_column(const std::string& name) const;
  std::size_t column(const std::string& name) const;
  // Throws CsvError (with the row's line number) if the cell is not numeric.
  double number(std::size_t row, std::size_t col) const;
};

// Rectangular comma-separated table with a header line.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);
// Numeric cells are re-rendered with format_double; others verbatim.
std::string emit_csv(const CsvTable& table);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

// Flat option objects, keyed by command-line flag names without the dashes.
nlohmann::json sim_options_defaults();
SimConfig sim_config_from_options(const nlohmann::json& opts);
nlohmann::json sweep_options_defaults();
SweepSpec sweep_spec_from_options(const nlohmann::json& opts);

// "0.1,0.5" or "log:lo:hi:n"
std::vector<double> parse_grid(const std::string& text);

nlohmann::json invariants_to_json(const InvariantSummary& s);

struct ManifestInfo {
  std::string command;
  nlohmann::json config;
  std::string stepper;
  double dt = 0.0;
  double wall_seconds = 0.0;
  nlohmann::json invariants = nlohmann::json::object();
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
};

nlohmann::json make_manifest(const ManifestInfo& info);

}  // namespace lzmeas

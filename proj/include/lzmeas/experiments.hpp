#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lzmeas/dynamics.hpp"

namespace lzmeas {

struct Asymptote {
  double value;
  double spread;  // half of max - min over the tail window
};

// Mean of population `index` (1 or 2) in `basis` over the final 10% of the
// trajectory window.
Asymptote extract_asymptote(const Trajectory& traj, Basis basis, int index);

// Negated least-squares slope of ln(p1_dia - p2_dia) over samples with t in
// [t0, t1]. Throws std::domain_error if the difference is not positive there.
double fit_decay_rate(const Trajectory& traj, double t0, double t1);

struct SweepSpec {
  std::vector<double> z_values;
  std::vector<double> lambda_values;
  Protocol protocol = Protocol::adiabatic();
  std::optional<Window> window;  // pins the window when set
  double dt = 0.005;
  int sample_stride = 20;
  Basis report_basis = Basis::adiabatic;
  Stepper stepper = Stepper::magnus4;
  GaugeSign gauge = GaugeSign::standard;
  unsigned jobs = 1;

  void validate() const;
};

struct SweepCell {
  double z;
  double lambda;
  double survival;  // NaN when the cell failed
  double spread;
  bool converged;
  double freeze_time;  // lambda / z
  std::string error;
};

// Cells sorted by (z, lambda).
struct SweepResult {
  std::vector<SweepCell> cells;

  const SweepCell* find(double z, double lambda) const;
};

// Index (1-based) of the initially occupied level in `basis`: diabatic
// level 1, or the adiabatic ground state (index 2).
int survival_index(Basis basis);

// Configuration used for one sweep cell. At lambda = 0 the protocols describe
// the same evolution, so every protocol runs it in the diabatic frame.
SimConfig cell_config(const SweepSpec& spec, double z, double lambda);

// One integrate + extract_asymptote per grid cell; failures are recorded in
// the cell. Output ordering does not depend on `jobs`.
SweepResult sweep(const SweepSpec& spec);

struct Dip {
  double lambda_min;
  double depth;  // survival(first lambda) - survival(lambda_min)
};

// Dip below the first grid point's survival by more than `tolerance`, if any.
std::optional<Dip> find_dip(std::span<const double> lambdas, std::span<const double> survival,
                            double tolerance = 0.0);

// Adiabatic-protocol scan of asymptotic survival over `lambda_grid`.
std::optional<Dip> find_nonmonotonicity(double z, std::span<const double> lambda_grid,
                                        double tolerance = 0.0, unsigned jobs = 1);

enum class FigureId { fig1a, fig1b, fig1c, fig2a, fig2b, fig2c, fig3a, fig3b };

std::string figure_name(FigureId id);
FigureId parse_figure(std::string_view name);
std::vector<FigureId> all_figures();

struct FigureOptions {
  bool fast = false;  // coarser grids and larger steps
  unsigned jobs = 1;
};

// Parameter choices used for each figure.
struct FigurePlan {
  Protocol protocol;
  std::vector<double> z_values;
  std::vector<double> lambda_values;
  Window window;
  bool time_series;
};

FigurePlan figure_plan(FigureId id, const FigureOptions& opts);

// Writes <name>.csv and <name>.manifest.json into `out_dir`; returns the CSV path.
std::filesystem::path reproduce_figure(FigureId id, const std::filesystem::path& out_dir,
                                       const FigureOptions& opts = {});

std::vector<double> log_space(double lo, double hi, int n);

}  // namespace lzmeas

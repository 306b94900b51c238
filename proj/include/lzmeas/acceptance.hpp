#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lzmeas/lz_model.hpp"

namespace lzmeas {

struct AcceptanceOptions {
  bool fast = false;  // thinner parameter grids
  GaugeSign gauge = GaugeSign::standard;  // inverted only to test that the suite notices
  unsigned jobs = 1;
  // Where the surface artifacts of criterion 11 go; a temporary directory when unset.
  std::optional<std::filesystem::path> artifact_dir;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // measured values
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 11;

// Throws std::out_of_range for ids outside 1..kCriterionCount.
CriterionResult run_criterion(int id, const AcceptanceOptions& opts = {});
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});

// "[PASS] 3 strong-measurement rate: ..."
std::string format_result(const CriterionResult& r);

}  // namespace lzmeas

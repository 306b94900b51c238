#pragma once

#include <string>
#include <string_view>

#include "lzmeas/io.hpp"

namespace lzmeas {

enum class PlotKind { timeseries, asymptote, surface };

std::string plot_kind_name(PlotKind kind);
PlotKind parse_plot_kind(std::string_view name);

struct PlotOptions {
  std::string column;  // timeseries: plotted population column (default p1_dia)
  std::string title;
};

// Static SVG. timeseries takes a trajectory CSV, optionally with a leading
// lambda column (one curve per value); asymptote and surface take a sweep CSV.
// Throws CsvError naming the offending line for malformed input.
std::string render_svg(const CsvTable& table, PlotKind kind, const PlotOptions& opts = {});

}  // namespace lzmeas

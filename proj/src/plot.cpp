#include "lzmeas/plot.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include <fmt/format.h>

namespace lzmeas {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

struct Range {
  double lo, hi;
  double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

Range padded(double lo, double hi) {
  if (!(hi > lo)) return {lo - 0.5, hi + 0.5};
  return {lo, hi};
}

std::string num(double v) { return fmt::format("{:.2f}", v); }

std::string tick_label(double v) { return fmt::format("{:.3g}", v); }

class Canvas {
 public:
  Canvas(std::string title, Range x, Range y, std::string xlabel, std::string ylabel)
      : x_(x), y_(y) {
    out_ << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">)",
                        kWidth, kHeight, kWidth, kHeight)
         << '\n';
    out_ << R"(<rect x="0" y="0" width="100%" height="100%" fill="white"/>)" << '\n';
    if (!title.empty())
      out_ << fmt::format(R"(<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>)",
                          num(kWidth / 2), title)
           << '\n';
    out_ << fmt::format(R"(<text class="xlabel" x="{}" y="{}" text-anchor="middle">{}</text>)",
                        num(kLeft + plot_w() / 2), num(kHeight - 15), xlabel)
         << '\n';
    out_ << fmt::format(R"svg(<text class="ylabel" transform="translate(18,{}) rotate(-90)" text-anchor="middle">{}</text>)svg",
                        num(kTop + plot_h() / 2), ylabel)
         << '\n';
  }

  static double plot_w() { return kWidth - kLeft - kRight; }
  static double plot_h() { return kHeight - kTop - kBottom; }
  double px(double x) const { return x_.map(x, kLeft, kLeft + plot_w()); }
  double py(double y) const { return y_.map(y, kTop + plot_h(), kTop); }

  void axes(bool numeric_ticks = true) {
    out_ << fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>)",
                        num(kLeft), num(kTop), num(plot_w()), num(plot_h()))
         << '\n';
    if (!numeric_ticks) return;
    for (int i = 0; i <= 4; ++i) {
      const double xv = x_.lo + (x_.hi - x_.lo) * i / 4.0;
      const double yv = y_.lo + (y_.hi - y_.lo) * i / 4.0;
      out_ << fmt::format(R"(<text x="{}" y="{}" text-anchor="middle">{}</text>)", num(px(xv)),
                          num(kTop + plot_h() + 16), tick_label(xv))
           << '\n';
      out_ << fmt::format(R"(<text x="{}" y="{}" text-anchor="end">{}</text>)", num(kLeft - 5),
                          num(py(yv) + 4), tick_label(yv))
           << '\n';
    }
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const char* color) {
    // NaN points split the curve.
    std::string path;
    bool pen_down = false;
    for (const auto& [x, y] : pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) {
        pen_down = false;
        continue;
      }
      path += fmt::format("{}{},{} ", pen_down ? 'L' : 'M', num(px(x)), num(py(y)));
      pen_down = true;
    }
    if (path.empty()) return;
    path.pop_back();
    out_ << fmt::format(R"(<path class="curve" d="{}" fill="none" stroke="{}" stroke-width="1.5"/>)", path,
                        color)
         << '\n';
  }

  void legend(std::size_t i, const std::string& label, const char* color) {
    const double y = kTop + 10 + 18.0 * static_cast<double>(i);
    const double x = kLeft + plot_w() + 12;
    out_ << fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="2"/>)", num(x),
                        num(y), num(x + 20), num(y), color)
         << '\n';
    out_ << fmt::format(R"(<text x="{}" y="{}">{}</text>)", num(x + 26), num(y + 4), label) << '\n';
  }

  void raw(const std::string& s) { out_ << s << '\n'; }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  Range x_, y_;
  std::ostringstream out_;
};

const char* color(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

std::string render_timeseries(const CsvTable& table, const PlotOptions& opts) {
  const std::string col = opts.column.empty() ? "p1_dia" : opts.column;
  const std::size_t ct = table.column("t");
  const std::size_t cp = table.column(col);
  const bool grouped = table.has_column("lambda");
  if (table.rows.empty()) throw CsvError(2, "no data rows");

  std::vector<double> keys;
  std::map<double, std::vector<std::pair<double, double>>> curves;
  double tlo = 0, thi = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const double key = grouped ? table.number(r, table.column("lambda")) : 0.0;
    const double t = table.number(r, ct);
    const double p = table.number(r, cp);
    if (!curves.count(key)) keys.push_back(key);
    curves[key].emplace_back(t, p);
    tlo = r == 0 ? t : std::min(tlo, t);
    thi = r == 0 ? t : std::max(thi, t);
  }
  Canvas c(opts.title, padded(tlo, thi), {0.0, 1.0}, "t (dimensionless)", "population " + col);
  c.axes();
  for (std::size_t i = 0; i < keys.size(); ++i) {
    c.polyline(curves[keys[i]], color(i));
    if (grouped) c.legend(i, "lambda = " + tick_label(keys[i]), color(i));
  }
  return c.finish();
}

struct Grid {
  std::vector<double> zs, lambdas;
  std::map<std::pair<double, double>, double> survival;
};

Grid read_grid(const CsvTable& table) {
  const std::size_t cz = table.column("z");
  const std::size_t cl = table.column("lambda");
  const std::size_t cs = table.column("survival");
  if (table.rows.empty()) throw CsvError(2, "no data rows");
  Grid g;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const double z = table.number(r, cz);
    const double l = table.number(r, cl);
    if (!g.survival.emplace(std::pair{z, l}, table.number(r, cs)).second)
      throw CsvError(table.lines[r], fmt::format("duplicate cell z={} lambda={}", z, l));
    g.zs.push_back(z);
    g.lambdas.push_back(l);
  }
  for (auto* v : {&g.zs, &g.lambdas}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  return g;
}

std::string render_asymptote(const CsvTable& table, const PlotOptions& opts) {
  const Grid g = read_grid(table);
  Canvas c(opts.title, padded(g.lambdas.front(), g.lambdas.back()), {0.0, 1.0}, "lambda (dimensionless)",
           "asymptotic survival");
  c.axes();
  for (std::size_t i = 0; i < g.zs.size(); ++i) {
    std::vector<std::pair<double, double>> pts;
    for (double l : g.lambdas) {
      auto it = g.survival.find({g.zs[i], l});
      if (it != g.survival.end()) pts.emplace_back(l, it->second);
    }
    c.polyline(pts, color(i));
    c.legend(i, "z = " + tick_label(g.zs[i]), color(i));
  }
  return c.finish();
}

// White (0) to dark blue (1).
std::string shade(double v) {
  if (!std::isfinite(v)) return "#bbbbbb";
  const double s = std::clamp(v, 0.0, 1.0);
  const auto channel = [s](double full) { return static_cast<int>(std::lround(255.0 + (full - 255.0) * s)); };
  return fmt::format("#{:02x}{:02x}{:02x}", channel(8), channel(48), channel(107));
}

std::string render_surface(const CsvTable& table, const PlotOptions& opts) {
  const Grid g = read_grid(table);
  const std::size_t nz = g.zs.size(), nl = g.lambdas.size();
  if (g.survival.size() != nz * nl) throw CsvError(1, "sweep grid is incomplete");
  Canvas c(opts.title, {0.0, static_cast<double>(nz)}, {0.0, static_cast<double>(nl)},
           "z (grid index, ascending)", "lambda (grid index, ascending)");
  const double w = Canvas::plot_w() / static_cast<double>(nz);
  const double h = Canvas::plot_h() / static_cast<double>(nl);
  c.raw(fmt::format(R"(<g class="surface" data-nz="{}" data-nlambda="{}">)", nz, nl));
  for (std::size_t i = 0; i < nz; ++i)
    for (std::size_t j = 0; j < nl; ++j) {
      const double v = g.survival.at({g.zs[i], g.lambdas[j]});
      c.raw(fmt::format(
          R"(<rect class="cell" x="{}" y="{}" width="{}" height="{}" fill="{}"><title>z={} lambda={} survival={}</title></rect>)",
          num(c.px(static_cast<double>(i))), num(c.py(static_cast<double>(j + 1))), num(w), num(h), shade(v),
          tick_label(g.zs[i]), tick_label(g.lambdas[j]), tick_label(v)));
    }
  c.raw("</g>");
  c.axes(false);
  const auto edge_labels = [&](const std::vector<double>& v, bool x_axis) {
    const std::size_t n = v.size();
    for (std::size_t k : {std::size_t{0}, n / 2, n - 1}) {
      const double mid = static_cast<double>(k) + 0.5;
      if (x_axis)
        c.raw(fmt::format(R"(<text x="{}" y="{}" text-anchor="middle">{}</text>)", num(c.px(mid)),
                          num(kTop + Canvas::plot_h() + 16), tick_label(v[k])));
      else
        c.raw(fmt::format(R"(<text x="{}" y="{}" text-anchor="end">{}</text>)", num(kLeft - 5),
                          num(c.py(mid) + 4), tick_label(v[k])));
    }
  };
  edge_labels(g.zs, true);
  edge_labels(g.lambdas, false);
  // Color bar.
  const double bx = kLeft + Canvas::plot_w() + 20;
  for (int k = 0; k < 10; ++k)
    c.raw(fmt::format(R"(<rect x="{}" y="{}" width="20" height="{}" fill="{}"/>)", num(bx),
                      num(kTop + Canvas::plot_h() * (1.0 - (k + 1) / 10.0)), num(Canvas::plot_h() / 10.0),
                      shade((k + 0.5) / 10.0)));
  c.raw(fmt::format(R"(<text x="{}" y="{}">1</text>)", num(bx + 26), num(kTop + 10)));
  c.raw(fmt::format(R"(<text x="{}" y="{}">0</text>)", num(bx + 26), num(kTop + Canvas::plot_h())));
  c.raw(fmt::format(R"(<text x="{}" y="{}">survival</text>)", num(bx), num(kTop - 8)));
  return c.finish();
}

}  // namespace

std::string plot_kind_name(PlotKind kind) {
  switch (kind) {
    case PlotKind::timeseries: return "timeseries";
    case PlotKind::asymptote: return "asymptote";
    case PlotKind::surface: return "surface";
  }
  return "?";
}

PlotKind parse_plot_kind(std::string_view name) {
  for (PlotKind k : {PlotKind::timeseries, PlotKind::asymptote, PlotKind::surface})
    if (name == plot_kind_name(k)) return k;
  throw std::invalid_argument(fmt::format("unknown plot kind '{}'", name));
}

std::string render_svg(const CsvTable& table, PlotKind kind, const PlotOptions& opts) {
  switch (kind) {
    case PlotKind::timeseries: return render_timeseries(table, opts);
    case PlotKind::asymptote: return render_asymptote(table, opts);
    case PlotKind::surface: return render_surface(table, opts);
  }
  throw std::invalid_argument("unknown plot kind");
}

}  // namespace lzmeas

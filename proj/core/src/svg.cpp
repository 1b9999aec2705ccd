#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "lesskit/harness.hpp"

namespace lesskit {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 560.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 24.0;
constexpr double kMarginBottom = 96.0;
constexpr double kFloor = 1e-12;  // log-scale clamp for zero/negative means

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string g10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void emit_svg_plot(std::span<const SweepResult> results, std::ostream& out) {
  if (results.empty()) throw EmptyResultsError("emit_svg_plot: no results");

  std::map<std::string, std::vector<const SweepResult*>> by_operator;
  double n_min = 1e300, n_max = -1e300;
  double y_min = 1e300, y_max = -1e300;
  std::map<std::size_t, double> reference;  // n -> formula value
  for (const SweepResult& r : results) {
    by_operator[r.operator_name].push_back(&r);
    n_min = std::min(n_min, static_cast<double>(r.n));
    n_max = std::max(n_max, static_cast<double>(r.n));
    for (double v : {std::max(r.mean_norm_err - r.stderr_of_mean, kFloor),
                     std::max(r.mean_norm_err + r.stderr_of_mean, kFloor),
                     std::max(r.gaussian_formula, kFloor)}) {
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
    reference[r.n] = r.gaussian_formula;
  }
  for (auto& [name, rows] : by_operator)
    std::sort(rows.begin(), rows.end(),
              [](const SweepResult* a, const SweepResult* b) { return a->n < b->n; });

  if (n_max == n_min) {
    n_min -= 1.0;
    n_max += 1.0;
  }
  const double ly_min = std::log10(y_min) - 0.15;
  const double ly_max = std::log10(y_max) + 0.15;
  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const auto sx = [&](double n) {
    return kMarginLeft + plot_w * (n - n_min) / (n_max - n_min);
  };
  const auto sy = [&](double v) {
    const double l = std::log10(std::max(v, kFloor));
    return kMarginTop + plot_h * (1.0 - (l - ly_min) / (ly_max - ly_min));
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";

  // Axes and decade gridlines.
  out << "<g stroke=\"#cccccc\" stroke-width=\"1\">\n";
  for (int e = static_cast<int>(std::floor(ly_min)); e <= static_cast<int>(std::ceil(ly_max));
       ++e) {
    const double v = std::pow(10.0, e);
    const double y = sy(v);
    if (y < kMarginTop || y > kMarginTop + plot_h) continue;
    out << "<line x1=\"" << g6(kMarginLeft) << "\" y1=\"" << g6(y) << "\" x2=\""
        << g6(kMarginLeft + plot_w) << "\" y2=\"" << g6(y) << "\"/>\n";
  }
  out << "</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n";
  for (int e = static_cast<int>(std::floor(ly_min)); e <= static_cast<int>(std::ceil(ly_max));
       ++e) {
    const double v = std::pow(10.0, e);
    const double y = sy(v);
    if (y < kMarginTop || y > kMarginTop + plot_h) continue;
    out << "<text x=\"8\" y=\"" << g6(y + 4) << "\">1e" << e << "</text>\n";
  }
  for (const auto& [n, value] : reference) {
    (void)value;
    out << "<text x=\"" << g6(sx(static_cast<double>(n)) - 8) << "\" y=\""
        << g6(kMarginTop + plot_h + 18) << "\">" << n << "</text>\n";
  }
  out << "<text x=\"" << g6(kMarginLeft + plot_w / 2 - 40) << "\" y=\""
      << g6(kMarginTop + plot_h + 40) << "\">sketch size n</text>\n";
  out << "<text x=\"8\" y=\"" << g6(kMarginTop - 8)
      << "\">normalized error (log scale)</text>\n";
  out << "</g>\n";
  out << "<rect x=\"" << g6(kMarginLeft) << "\" y=\"" << g6(kMarginTop) << "\" width=\""
      << g6(plot_w) << "\" height=\"" << g6(plot_h)
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";

  // Dashed reference curve with machine-readable values.
  out << "<polyline class=\"reference\" fill=\"none\" stroke=\"#444444\" "
         "stroke-dasharray=\"6,4\" data-ref=\"";
  {
    bool first = true;
    for (const auto& [n, value] : reference) {
      if (!first) out << ';';
      out << n << ':' << g10(value);
      first = false;
    }
  }
  out << "\" points=\"";
  {
    bool first = true;
    for (const auto& [n, value] : reference) {
      if (!first) out << ' ';
      out << g6(sx(static_cast<double>(n))) << ',' << g6(sy(value));
      first = false;
    }
  }
  out << "\"/>\n";

  std::size_t color_index = 0;
  const double legend_y0 = kMarginTop + plot_h + 56;
  for (const auto& [name, rows] : by_operator) {
    const char* color = kPalette[color_index % (sizeof(kPalette) / sizeof(kPalette[0]))];

    // ±1 stderr band.
    out << "<polygon class=\"band\" fill=\"" << color << "\" fill-opacity=\"0.15\" "
        << "stroke=\"none\" points=\"";
    for (const SweepResult* r : rows)
      out << g6(sx(static_cast<double>(r->n))) << ','
          << g6(sy(r->mean_norm_err + r->stderr_of_mean)) << ' ';
    for (auto it = rows.rbegin(); it != rows.rend(); ++it)
      out << g6(sx(static_cast<double>((*it)->n))) << ','
          << g6(sy(std::max((*it)->mean_norm_err - (*it)->stderr_of_mean, kFloor)))
          << (std::next(it) == rows.rend() ? "" : " ");
    out << "\"/>\n";

    out << "<polyline class=\"series\" data-operator=\"" << name << "\" fill=\"none\" stroke=\""
        << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i) out << ' ';
      out << g6(sx(static_cast<double>(rows[i]->n))) << ','
          << g6(sy(rows[i]->mean_norm_err));
    }
    out << "\"/>\n";

    for (const SweepResult* r : rows)
      out << "<circle class=\"marker\" data-operator=\"" << name << "\" cx=\""
          << g6(sx(static_cast<double>(r->n))) << "\" cy=\"" << g6(sy(r->mean_norm_err))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";

    const double ly = legend_y0 + 16.0 * static_cast<double>(color_index);
    out << "<line x1=\"" << g6(kMarginLeft) << "\" y1=\"" << g6(ly - 4) << "\" x2=\""
        << g6(kMarginLeft + 24) << "\" y2=\"" << g6(ly - 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\" x=\""
        << g6(kMarginLeft + 30) << "\" y=\"" << g6(ly) << "\">" << name << "</text>\n";
    ++color_index;
  }
  out << "</svg>\n";
  if (!out) throw IoError("emit_svg_plot: output stream failed");
}

}  // namespace lesskit

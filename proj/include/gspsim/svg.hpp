#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>

#include "gspsim/errors.hpp"
#include "gspsim/experiment.hpp"

namespace gspsim {

struct PlotSeries {
  std::string label;
  const SweepResult* result = nullptr;
};

namespace detail {

inline std::string svg_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline constexpr std::array<const char*, 6> kStrokes = {"#1f77b4", "#7f7f7f", "#2ca02c",
                                                        "#d62728", "#9467bd", "#8c564b"};
inline constexpr std::array<const char*, 6> kDashes = {"", "7 4", "2 3", "8 3 2 3", "12 4", "4 4"};

}  // namespace detail

/// Self-contained static SVG line chart: alpha on the horizontal axis, the
/// normalized metric on the vertical axis in [0, 1]. Series get distinct
/// stroke colors and dash patterns so overlays stay readable.
inline std::string svg_string(std::span<const PlotSeries> series, Metric metric) {
  if (series.empty()) throw std::invalid_argument("svg: need at least one series");
  for (const auto& s : series)
    if (s.result == nullptr || s.result->rows.empty())
      throw std::invalid_argument("svg: series without rows");

  constexpr double width = 880, height = 560;
  constexpr double left = 70, right = 30, top = 48, bottom = 64;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double alpha_min = series[0].result->rows.front().alpha;
  double alpha_max = series[0].result->rows.back().alpha;
  for (const auto& s : series) {
    alpha_min = std::min(alpha_min, s.result->rows.front().alpha);
    alpha_max = std::max(alpha_max, s.result->rows.back().alpha);
  }
  if (!(alpha_max > alpha_min)) alpha_max = alpha_min + 1.0;

  const auto x_of = [&](double alpha) {
    return left + (alpha - alpha_min) / (alpha_max - alpha_min) * plot_w;
  };
  const auto y_of = [&](double norm) { return top + (1.0 - norm) * plot_h; };

  const auto norm_of = [&](const SweepRow& row) {
    switch (metric) {
      case Metric::revenue: return row.revenue_norm;
      case Metric::efficiency: return row.efficiency_norm;
      case Metric::relevance: return row.relevance_norm;
    }
    return row.revenue_norm;
  };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + detail::svg_coord(width) +
         " " + detail::svg_coord(height) + "\" font-family=\"sans-serif\" font-size=\"13\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + detail::svg_coord(width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
         "Normalized total " + metric_name(metric) + "</text>\n";

  // y gridlines and labels at 0, 0.25, ..., 1
  for (int i = 0; i <= 4; ++i) {
    const double norm = 0.25 * i;
    const double y = y_of(norm);
    out += "<line x1=\"" + detail::svg_coord(left) + "\" y1=\"" + detail::svg_coord(y) + "\" x2=\"" +
           detail::svg_coord(left + plot_w) + "\" y2=\"" + detail::svg_coord(y) +
           "\" stroke=\"#dddddd\"/>\n";
    char label[16];
    std::snprintf(label, sizeof label, "%.2f", norm);
    out += "<text x=\"" + detail::svg_coord(left - 8) + "\" y=\"" + detail::svg_coord(y + 4) +
           "\" text-anchor=\"end\">" + label + "</text>\n";
  }
  // x ticks every 0.5 from the first covered half-integer
  const double tick0 = std::ceil(alpha_min * 2.0 - 1e-9) / 2.0;
  for (double tick = tick0; tick <= alpha_max + 1e-9; tick += 0.5) {
    const double x = x_of(tick);
    out += "<line x1=\"" + detail::svg_coord(x) + "\" y1=\"" + detail::svg_coord(top + plot_h) +
           "\" x2=\"" + detail::svg_coord(x) + "\" y2=\"" + detail::svg_coord(top + plot_h + 6) +
           "\" stroke=\"#333333\"/>\n";
    char label[16];
    std::snprintf(label, sizeof label, "%g", tick);
    out += "<text x=\"" + detail::svg_coord(x) + "\" y=\"" + detail::svg_coord(top + plot_h + 22) +
           "\" text-anchor=\"middle\">" + label + "</text>\n";
  }
  out += "<rect x=\"" + detail::svg_coord(left) + "\" y=\"" + detail::svg_coord(top) + "\" width=\"" +
         detail::svg_coord(plot_w) + "\" height=\"" + detail::svg_coord(plot_h) +
         "\" fill=\"none\" stroke=\"#333333\"/>\n";
  out += "<text x=\"" + detail::svg_coord(left + plot_w / 2) + "\" y=\"" +
         detail::svg_coord(height - 16) + "\" text-anchor=\"middle\">alpha</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* stroke = detail::kStrokes[si % detail::kStrokes.size()];
    const char* dash = detail::kDashes[si % detail::kDashes.size()];
    out += "<polyline fill=\"none\" stroke=\"";
    out += stroke;
    out += "\" stroke-width=\"2\"";
    if (dash[0] != '\0') out += std::string(" stroke-dasharray=\"") + dash + "\"";
    out += " points=\"";
    for (const SweepRow& row : series[si].result->rows) {
      out += detail::svg_coord(x_of(row.alpha));
      out.push_back(',');
      out += detail::svg_coord(y_of(norm_of(row)));
      out.push_back(' ');
    }
    if (out.back() == ' ') out.pop_back();
    out += "\"/>\n";
    // legend entry
    const double ly = top + 14 + 20.0 * static_cast<double>(si);
    const double lx = left + plot_w - 170;
    out += "<line x1=\"" + detail::svg_coord(lx) + "\" y1=\"" + detail::svg_coord(ly) + "\" x2=\"" +
           detail::svg_coord(lx + 28) + "\" y2=\"" + detail::svg_coord(ly) + "\" stroke=\"";
    out += stroke;
    out += "\" stroke-width=\"2\"";
    if (dash[0] != '\0') out += std::string(" stroke-dasharray=\"") + dash + "\"";
    out += "/>\n";
    out += "<text x=\"" + detail::svg_coord(lx + 34) + "\" y=\"" + detail::svg_coord(ly + 4) + "\">" +
           series[si].label + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

inline void write_plot(std::span<const PlotSeries> series, Metric metric,
                       const std::filesystem::path& path) {
  const std::string body = svg_string(series, metric);
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for writing: " + path.string());
  file.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!file) throw IoError("write failed: " + path.string());
}

}  // namespace gspsim

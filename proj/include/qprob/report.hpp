#pragma once

// Flat-file emitters: 17-significant-digit CSV for ensemble runs and a
// minimal static SVG 1.1 line chart.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "qprob/becsim.hpp"

namespace qprob {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline constexpr const char* kEnsembleCsvHeader = "t,p1,p2,f1,f2,q1,q2,stderr1";

inline void write_ensemble_csv(std::ostream& os, const bec::EnsembleResult& r) {
  os << kEnsembleCsvHeader << '\n';
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    os << format_g17(r.times[i]) << ',' << format_g17(r.p1[i]) << ',' << format_g17(r.p2[i]) << ','
       << format_g17(r.f1[i]) << ',' << format_g17(r.f2[i]) << ',' << format_g17(r.q1[i]) << ','
       << format_g17(r.q2[i]) << ',' << format_g17(r.stdErr1[i]) << '\n';
  }
}

struct LinePlot {
  std::string title;
  std::string caption;
  std::string xLabel = "t";
  std::string yLabel;
  int width = 640;
  int height = 400;
};

namespace detail {

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace detail

// Polyline of ys against xs with a frame, min/max tick labels, a zero line
// when zero is in range, and a caption below the axis.
inline void write_svg_line_plot(std::ostream& os, std::span<const double> xs, std::span<const double> ys,
                                const LinePlot& spec) {
  constexpr double left = 70, right = 20, top = 40, bottom = 70;
  const double w = spec.width - left - right;
  const double h = spec.height - top - bottom;

  double xmin = xs.empty() ? 0.0 : xs.front();
  double xmax = xs.empty() ? 1.0 : xs.back();
  double ymin = 0.0, ymax = 0.0;
  if (!ys.empty()) {
    const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
    ymin = *lo;
    ymax = *hi;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * w; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * h; };

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << spec.width << "\" height=\""
     << spec.height << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << spec.width << "\" height=\"" << spec.height << "\" fill=\"white\"/>\n"
     << "<text x=\"" << spec.width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
     << detail::svg_escape(spec.title) << "</text>\n"
     << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w << "\" height=\"" << h
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (ymin < 0.0 && ymax > 0.0) {
    os << "<line x1=\"" << left << "\" y1=\"" << detail::fmt("%.2f", py(0.0)) << "\" x2=\"" << left + w << "\" y2=\""
       << detail::fmt("%.2f", py(0.0)) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  const char* tick = "font-family=\"sans-serif\" font-size=\"11\"";
  os << "<text x=\"" << left - 6 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\" " << tick << ">"
     << detail::fmt("%.3g", ymax) << "</text>\n"
     << "<text x=\"" << left - 6 << "\" y=\"" << top + h << "\" text-anchor=\"end\" " << tick << ">"
     << detail::fmt("%.3g", ymin) << "</text>\n"
     << "<text x=\"" << left << "\" y=\"" << top + h + 16 << "\" text-anchor=\"middle\" " << tick << ">"
     << detail::fmt("%.3g", xmin) << "</text>\n"
     << "<text x=\"" << left + w << "\" y=\"" << top + h + 16 << "\" text-anchor=\"middle\" " << tick << ">"
     << detail::fmt("%.3g", xmax) << "</text>\n"
     << "<text x=\"" << left + w / 2 << "\" y=\"" << top + h + 32 << "\" text-anchor=\"middle\" " << tick << ">"
     << detail::svg_escape(spec.xLabel) << "</text>\n"
     << "<text x=\"18\" y=\"" << top + h / 2 << "\" text-anchor=\"middle\" " << tick << " transform=\"rotate(-90 18 "
     << top + h / 2 << ")\">" << detail::svg_escape(spec.yLabel) << "</text>\n";

  // Thin the polyline to about two points per horizontal pixel.
  const std::size_t n = std::min(xs.size(), ys.size());
  const std::size_t step = std::max<std::size_t>(1, n / static_cast<std::size_t>(2 * w));
  os << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1\" points=\"";
  for (std::size_t i = 0; i < n; i += step) {
    os << detail::fmt("%.2f", px(xs[i])) << ',' << detail::fmt("%.2f", py(ys[i])) << ' ';
  }
  if (n > 0 && (n - 1) % step != 0) os << detail::fmt("%.2f", px(xs[n - 1])) << ',' << detail::fmt("%.2f", py(ys[n - 1]));
  os << "\"/>\n"
     << "<text x=\"" << spec.width / 2 << "\" y=\"" << spec.height - 12 << "\" text-anchor=\"middle\" " << tick << ">"
     << detail::svg_escape(spec.caption) << "</text>\n"
     << "</svg>\n";
}

}  // namespace qprob

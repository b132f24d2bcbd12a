// Copyright 2026 The finsler_ccm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "output.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace finsler_ccm::cli {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 52.0;

std::string fmt(const char* pattern, double value) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), pattern, value);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo;
  double hi;
  double step;
};

// Rounds the data range outward to a 1-2-5 tick grid with about five ticks.
Axis nice_axis(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) return {0.0, 1.0, 0.2};
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    const double pad = std::max(1e-3, 0.1 * std::abs(hi));
    lo -= pad;
    hi += pad;
  }
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = 10.0 * mag;
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  return {std::floor(lo / step) * step, std::ceil(hi / step) * step, step};
}

}  // namespace

std::string format_g12(double value) { return fmt("%.12g", value); }

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  const std::size_t nodes = traj.empty() ? 0 : traj.samples.front().node_values.size();
  const int width = std::max(3, static_cast<int>(std::to_string(nodes).size()));
  out << "t";
  for (int i = 1; i <= traj.state_dim; ++i) out << ",x" << i;
  for (int i = 1; i <= traj.input_dim; ++i) out << ",u" << i;
  out << ",energy,dist_est";
  for (std::size_t j = 0; j < nodes; ++j) {
    std::string index = std::to_string(j);
    out << ",V_" << std::string(width - index.size(), '0') << index;
  }
  out << '\n';
  for (const TrajectorySample& s : traj.samples) {
    out << format_g12(s.t);
    for (Eigen::Index i = 0; i < s.state.size(); ++i) out << ',' << format_g12(s.state(i));
    for (Eigen::Index i = 0; i < s.control.size(); ++i) out << ',' << format_g12(s.control(i));
    out << ',' << format_g12(s.energy) << ',' << format_g12(s.length);
    for (double v : s.node_values) out << ',' << format_g12(v);
    out << '\n';
  }
}

void write_line_plot(std::ostream& out, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<Series>& series) {
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  }
  const Axis ax = nice_axis(x_lo, x_hi);
  const Axis ay = nice_axis(y_lo, y_hi);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - ax.lo) / (ax.hi - ax.lo) * plot_w; };
  auto py = [&](double y) { return kTop + (ay.hi - y) / (ay.hi - ay.lo) * plot_h; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(title) << "</text>\n";

  out << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double x = ax.lo; x <= ax.hi + 0.5 * ax.step; x += ax.step) {
    out << "<line x1=\"" << fmt("%.2f", px(x)) << "\" y1=\"" << kTop << "\" x2=\""
        << fmt("%.2f", px(x)) << "\" y2=\"" << kTop + plot_h << "\"/>\n";
  }
  for (double y = ay.lo; y <= ay.hi + 0.5 * ay.step; y += ay.step) {
    out << "<line x1=\"" << kLeft << "\" y1=\"" << fmt("%.2f", py(y)) << "\" x2=\""
        << kLeft + plot_w << "\" y2=\"" << fmt("%.2f", py(y)) << "\"/>\n";
  }
  out << "</g>\n";

  out << "<g text-anchor=\"middle\">\n";
  for (double x = ax.lo; x <= ax.hi + 0.5 * ax.step; x += ax.step) {
    out << "<text x=\"" << fmt("%.2f", px(x)) << "\" y=\"" << kTop + plot_h + 16 << "\">"
        << fmt("%g", std::abs(x) < 1e-12 * ax.step ? 0.0 : x) << "</text>\n";
  }
  out << "</g>\n<g text-anchor=\"end\">\n";
  for (double y = ay.lo; y <= ay.hi + 0.5 * ay.step; y += ay.step) {
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt("%.2f", py(y) + 4) << "\">"
        << fmt("%g", std::abs(y) < 1e-12 * ay.step ? 0.0 : y) << "</text>\n";
  }
  out << "</g>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  out << "<text transform=\"translate(16 " << kTop + plot_h / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";

  for (const Series& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out << fmt("%.2f", px(s.x[i])) << ',' << fmt("%.2f", py(s.y[i])) << ' ';
    }
    out << "\"/>\n";
  }

  double legend_y = kTop + 16;
  for (const Series& s : series) {
    const double lx = kLeft + plot_w - 150;
    out << "<line x1=\"" << lx << "\" y1=\"" << legend_y - 4 << "\" x2=\"" << lx + 24
        << "\" y2=\"" << legend_y - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
        << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n"
        << "<text x=\"" << lx + 30 << "\" y=\"" << legend_y << "\">" << escape(s.label)
        << "</text>\n";
    legend_y += 16;
  }
  out << "</svg>\n";
}

}  // namespace finsler_ccm::cli

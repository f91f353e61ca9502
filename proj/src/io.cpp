// Copyright 2026 The STA Lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sta/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sta::io {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(std::span<const std::string> header, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw std::invalid_argument("CSV row length does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string schedule_csv(const DriveSchedule& s, std::size_t samples, double omega0) {
  if (samples < 2) throw std::invalid_argument("schedule export needs at least 2 samples");
  static const std::vector<std::string> header{"t",  "gamma", "dgamma", "ddgamma", "f",
                                               "df", "ddf",   "tau",    "chi",     "omega_sq_cd"};
  std::vector<double> times(samples);
  for (std::size_t k = 0; k < samples; ++k)
    times[k] = k + 1 == samples ? s.duration() : s.duration() * static_cast<double>(k) / (samples - 1);
  const auto tau = tau_on_grid(s, times);
  std::vector<std::vector<double>> rows;
  rows.reserve(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const auto x = s.local(times[k]);
    const double chi = s.f_final() != 0.0 ? transport_amplitude_chi(s, times[k]) : 0.0;
    const double w2 = consistency_at(s, 2.0, omega0, times[k]).omega_sq;
    rows.push_back({x.t, x.gamma, x.dgamma, x.ddgamma, x.f, x.df, x.ddf, tau[k], chi, w2});
  }
  return to_csv(header, rows);
}

std::string trajectory_csv(const Trajectory& tr) {
  static const std::vector<std::string> header{"t", "q", "p", "H", "omega", "I"};
  std::vector<std::vector<double>> rows;
  for (const auto& s : tr.samples) rows.push_back({s.t, s.z.q, s.z.p, s.H, s.omega, s.I});
  return to_csv(header, rows);
}

std::string invariant_csv(std::span<const InvariantSample> samples) {
  static const std::vector<std::string> header{"t", "F_vs_Utarget", "F_vs_target", "norm", "energy"};
  std::vector<std::vector<double>> rows;
  for (const auto& s : samples) rows.push_back({s.t, s.F_vs_Utarget, s.F_vs_target, s.norm, s.energy});
  return to_csv(header, rows);
}

std::string meanfield_csv(std::span<const MeanFieldSample> samples) {
  static const std::vector<std::string> header{"t", "R", "F", "norm", "g"};
  std::vector<std::vector<double>> rows;
  for (const auto& s : samples) rows.push_back({s.t, s.R, s.F, s.norm, s.g});
  return to_csv(header, rows);
}

std::string box_events_csv(std::span<const BoxEvent> events) {
  // event codes: 0 left wall, 1 right wall, 2 impulse on, 3 impulse off
  static const std::vector<std::string> header{"t", "event", "q", "p_before", "p_after"};
  std::vector<std::vector<double>> rows;
  for (const auto& e : events)
    rows.push_back({e.t, static_cast<double>(static_cast<int>(e.kind)), e.q, e.p_before, e.p_after});
  return to_csv(header, rows);
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// -- SVG ------------------------------------------------------------------------------

namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Frame2 {
  double x0, x1, y0, y1;     // data range
  double left, right, top, bottom;  // pixel box
  double px(double x) const { return left + (x - x0) / (x1 - x0) * (right - left); }
  double py(double y) const { return bottom - (y - y0) / (y1 - y0) * (bottom - top); }
};

void widen(double& lo, double& hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.04 * (hi - lo);
  lo -= pad;
  hi += pad;
}

void axes(std::ostringstream& o, const Frame2& f, std::string_view title, std::string_view xl, std::string_view yl,
          double w, double h) {
  o << "<rect x=\"0\" y=\"0\" width=\"" << num(w) << "\" height=\"" << num(h) << "\" fill=\"white\"/>\n";
  o << "<rect x=\"" << num(f.left) << "\" y=\"" << num(f.top) << "\" width=\"" << num(f.right - f.left)
    << "\" height=\"" << num(f.bottom - f.top) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = f.x0 + (f.x1 - f.x0) * k / 4.0, yv = f.y0 + (f.y1 - f.y0) * k / 4.0;
    o << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << num(f.bottom + 16) << "\" font-size=\"11\" "
      << "text-anchor=\"middle\">" << tick(xv) << "</text>\n";
    o << "<text x=\"" << num(f.left - 6) << "\" y=\"" << num(f.py(yv) + 4) << "\" font-size=\"11\" "
      << "text-anchor=\"end\">" << tick(yv) << "</text>\n";
  }
  o << "<text x=\"" << num(0.5 * (f.left + f.right)) << "\" y=\"" << num(f.top - 10)
    << "\" font-size=\"14\" text-anchor=\"middle\">" << escape(title) << "</text>\n";
  o << "<text x=\"" << num(0.5 * (f.left + f.right)) << "\" y=\"" << num(h - 8)
    << "\" font-size=\"12\" text-anchor=\"middle\">" << escape(xl) << "</text>\n";
  o << "<text x=\"14\" y=\"" << num(0.5 * (f.top + f.bottom)) << "\" font-size=\"12\" text-anchor=\"middle\" "
    << "transform=\"rotate(-90 14 " << num(0.5 * (f.top + f.bottom)) << ")\">" << escape(yl) << "</text>\n";
}

}  // namespace

std::string svg_plot(const Plot& plot) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series)
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, s.y[k]);
      y1 = std::max(y1, s.y[k]);
    }
  widen(x0, x1);
  widen(y0, y1);
  const Frame2 f{x0, x1, y0, y1, 70.0, plot.width - 20.0, 36.0, plot.height - 44.0};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(plot.width) << "\" height=\""
    << num(plot.height) << "\" viewBox=\"0 0 " << num(plot.width) << " " << num(plot.height) << "\">\n";
  axes(o, f, plot.title, plot.xlabel, plot.ylabel, plot.width, plot.height);
  double legend_y = f.top + 14;
  for (const auto& s : plot.series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.scatter) {
      for (std::size_t k = 0; k < n; ++k)
        if (std::isfinite(s.x[k]) && std::isfinite(s.y[k]))
          o << "<circle cx=\"" << num(f.px(s.x[k])) << "\" cy=\"" << num(f.py(s.y[k])) << "\" r=\"1.6\" fill=\""
            << s.color << "\"/>\n";
    } else {
      // NaN breaks the line into pieces
      std::string path;
      bool pen = false;
      for (std::size_t k = 0; k < n; ++k) {
        if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) {
          pen = false;
          continue;
        }
        path += pen ? " L" : " M";
        path += num(f.px(s.x[k])) + " " + num(f.py(s.y[k]));
        pen = true;
      }
      o << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.4\""
        << (s.dotted ? " stroke-dasharray=\"2 3\"" : "") << "/>\n";
    }
    if (!s.label.empty()) {
      o << "<text x=\"" << num(f.right - 8) << "\" y=\"" << num(legend_y) << "\" font-size=\"11\" "
        << "text-anchor=\"end\" fill=\"" << s.color << "\">" << escape(s.label) << "</text>\n";
      legend_y += 14;
    }
  }
  o << "</svg>\n";
  return o.str();
}

std::string svg_waterfall(const SpatialGrid& grid, std::span<const DensitySnapshot> snapshots,
                          std::string_view title) {
  double peak = 0.0;
  for (const auto& s : snapshots)
    for (double v : s.rho) peak = std::max(peak, v);
  if (peak <= 0.0) peak = 1.0;
  const double offset = 0.6 * peak;
  Plot p;
  p.title = std::string(title);
  p.xlabel = "q";
  p.ylabel = "|psi|^2 (offset by snapshot)";
  const auto q = grid.points();
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    Series s;
    s.label = "t = " + tick(snapshots[i].t);
    s.color = colors[i % 6];
    s.x = q;
    s.y.resize(q.size());
    for (std::size_t k = 0; k < q.size() && k < snapshots[i].rho.size(); ++k)
      s.y[k] = snapshots[i].rho[k] + offset * static_cast<double>(i);
    p.series.push_back(std::move(s));
  }
  return svg_plot(p);
}

}  // namespace sta::io

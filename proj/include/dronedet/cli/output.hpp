// SPDX-License-Identifier: Apache-2.0
//
// dronedet: RSS-based drone detection in a Poisson field of interferers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

/// @file output.hpp
/// CSV tables and self-contained SVG line plots. Number formatting goes
/// through snprintf with fixed formats so files are byte-stable.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "dronedet/error.hpp"

namespace dronedet::cli {

inline std::string fmt(double x) {
  if (std::isnan(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

/// A CSV table whose first line is "# schema: <name>/<version>".
class CsvTable {
 public:
  CsvTable(std::string schema, std::vector<std::string> columns)
      : schema_(std::move(schema)), columns_(std::move(columns)) {}

  CsvTable& row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size()) throw Error("csv: row width does not match header of " + schema_);
    rows_.push_back(std::move(cells));
    return *this;
  }

  std::string str() const {
    std::string out = "# schema: " + schema_ + "\n";
    auto line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    line(columns_);
    for (const auto& r : rows_) line(r);
    return out;
  }

  std::size_t size() const { return rows_.size(); }

 private:
  std::string schema_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes `text` to dir/name, creating dir; returns the path.
inline std::string write_file(const std::string& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  const auto path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  return path;
}

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
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

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

}  // namespace detail

inline std::string render_svg(const LinePlot& plot) {
  constexpr double W = 720, H = 480, L = 80, R = 200, T = 40, B = 60;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  auto tx = [&](double v) { return plot.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return plot.log_y ? std::log10(v) : v; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double a = tx(s.x[i]), b = ty(s.y[i]);
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      x0 = std::min(x0, a), x1 = std::max(x1, a), y0 = std::min(y0, b), y1 = std::max(y1, b);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pw = W - L - R, ph = H - T - B;
  auto px = [&](double a) { return L + (a - x0) / (x1 - x0) * pw; };
  auto py = [&](double b) { return T + ph - (b - y0) / (y1 - y0) * ph; };
  using detail::num;
  using detail::xml_escape;

  std::string o = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
                  "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + num(L + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
       xml_escape(plot.title) + "</text>\n";
  o += "<rect x=\"" + num(L) + "\" y=\"" + num(T) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double a = x0 + (x1 - x0) * k / 4.0, b = y0 + (y1 - y0) * k / 4.0;
    const double av = plot.log_x ? std::pow(10.0, a) : a, bv = plot.log_y ? std::pow(10.0, b) : b;
    char lx[32], ly[32];
    std::snprintf(lx, sizeof lx, "%.3g", av);
    std::snprintf(ly, sizeof ly, "%.4g", bv);
    o += "<text x=\"" + num(px(a)) + "\" y=\"" + num(T + ph + 16) + "\" text-anchor=\"middle\">" + lx + "</text>\n";
    o += "<text x=\"" + num(L - 6) + "\" y=\"" + num(py(b) + 4) + "\" text-anchor=\"end\">" + ly + "</text>\n";
  }
  o += "<text x=\"" + num(L + pw / 2) + "\" y=\"" + num(H - 16) + "\" text-anchor=\"middle\">" +
       xml_escape(plot.x_label) + "</text>\n";
  o += "<text transform=\"translate(18," + num(T + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       xml_escape(plot.y_label) + "</text>\n";
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* c = colors[k % 10];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double a = tx(s.x[i]), b = ty(s.y[i]);
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      pts += num(px(a)) + "," + num(py(b)) + " ";
    }
    o += "<polyline fill=\"none\" stroke=\"" + std::string(c) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    const double ly = T + 14 + 18 * k;
    o += "<line x1=\"" + num(W - R + 10) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(W - R + 30) + "\" y2=\"" +
         num(ly - 4) + "\" stroke=\"" + c + "\" stroke-width=\"2\"/>\n";
    o += "<text x=\"" + num(W - R + 36) + "\" y=\"" + num(ly) + "\">" + xml_escape(s.name) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

}  // namespace dronedet::cli

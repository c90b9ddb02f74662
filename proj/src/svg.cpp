// Copyright 2026 The segrobust Authors.
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

#include "segrobust/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace segrobust::svg {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series) {
  constexpr double W = 640, H = 420, left = 60, right = 150, top = 40, bottom = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 100;
  bool any = false;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      if (!any) {
        x0 = x1 = s.x[i];
        any = true;
      }
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
    }
  }
  if (x1 == x0) x1 = x0 + 1;
  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title) << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double yv = y0 + (y1 - y0) * t / 5.0;
    out << "<text x=\"" << left - 6 << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">" << num(yv) << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << num(py(yv)) << "\" x2=\"" << left + pw << "\" y2=\"" << num(py(yv))
        << "\" stroke=\"#dddddd\"/>\n";
  }
  for (double xv = std::ceil(x0); xv <= x1; xv += 1.0) {
    out << "<text x=\"" << num(px(xv)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << num(xv)
        << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  out << "<text transform=\"translate(16," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label)
      << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (std::isfinite(series[s].y[i])) out << num(px(series[s].x[i])) << ',' << num(py(series[s].y[i])) << ' ';
    }
    out << "\"/>\n";
    const double ly = top + 16.0 * static_cast<double>(s);
    out << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 30 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + pw + 35 << "\" y=\"" << ly + 4 << "\">" << escape(series[s].name) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string heatmap(const std::string& title, const std::vector<double>& matrix, std::size_t n,
                    const std::vector<std::string>& labels, double lo, double hi) {
  const double cell = std::max(18.0, 360.0 / static_cast<double>(std::max<std::size_t>(n, 1)));
  const double left = 60, top = 50;
  const double W = left + cell * static_cast<double>(n) + 20, H = top + cell * static_cast<double>(n) + 20;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(W) << "\" height=\"" << num(H)
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(W / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(title) << "</text>\n";
  for (std::size_t r = 0; r < n; ++r) {
    const std::string label = r < labels.size() ? labels[r] : std::to_string(r);
    out << "<text x=\"" << left - 4 << "\" y=\"" << num(top + cell * (static_cast<double>(r) + 0.65))
        << "\" text-anchor=\"end\">" << escape(label) << "</text>\n";
    out << "<text x=\"" << num(left + cell * (static_cast<double>(r) + 0.5)) << "\" y=\"" << top - 4
        << "\" text-anchor=\"middle\">" << escape(label) << "</text>\n";
    for (std::size_t c = 0; c < n; ++c) {
      const double v = matrix[r * n + c];
      const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0) * 2.0 - 1.0;  // -1 blue .. +1 red
      const int red = t > 0 ? 255 : static_cast<int>(255 * (1 + t));
      const int blue = t < 0 ? 255 : static_cast<int>(255 * (1 - t));
      const int green = static_cast<int>(255 * (1 - std::abs(t)));
      out << "<rect x=\"" << num(left + cell * static_cast<double>(c)) << "\" y=\"" << num(top + cell * static_cast<double>(r))
          << "\" width=\"" << num(cell) << "\" height=\"" << num(cell) << "\" fill=\"rgb(" << red << ',' << green << ','
          << blue << ")\"><title>" << num(v) << "</title></rect>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace segrobust::svg

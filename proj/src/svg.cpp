// Copyright 2026 The nlpc Authors.
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

#include "nlpc/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace nlpc {
namespace {

constexpr double kWidth = 640, kHeight = 400, kMargin = 48;
constexpr std::array<const char*, 4> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string svg_chart(const std::string& title, const std::vector<SvgSeries>& series,
                      bool diagonal) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (diagonal) xmin = ymin = std::min(xmin, ymin), xmax = ymax = std::max(xmax, ymax);
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  auto px = [&](double x) { return kMargin + (x - xmin) / (xmax - xmin) * (kWidth - 2 * kMargin); };
  auto py = [&](double y) {
    return kHeight - kMargin - (y - ymin) / (ymax - ymin) * (kHeight - 2 * kMargin);
  };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
                    "\" height=\"" + num(kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(kMargin) + "\" y=\"24\" font-size=\"14\">" + title + "</text>\n";
  out += "<rect x=\"" + num(kMargin) + "\" y=\"" + num(kMargin) + "\" width=\"" +
         num(kWidth - 2 * kMargin) + "\" height=\"" + num(kHeight - 2 * kMargin) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  out += "<text x=\"" + num(kMargin) + "\" y=\"" + num(kHeight - 28) + "\" font-size=\"10\">" +
         num(xmin) + "</text><text x=\"" + num(kWidth - kMargin - 30) + "\" y=\"" +
         num(kHeight - 28) + "\" font-size=\"10\">" + num(xmax) + "</text>\n";
  out += "<text x=\"4\" y=\"" + num(kHeight - kMargin) + "\" font-size=\"10\">" + num(ymin) +
         "</text><text x=\"4\" y=\"" + num(kMargin + 8) + "\" font-size=\"10\">" + num(ymax) +
         "</text>\n";
  if (diagonal)
    out += "<line x1=\"" + num(px(xmin)) + "\" y1=\"" + num(py(ymin)) + "\" x2=\"" +
           num(px(xmax)) + "\" y2=\"" + num(py(ymax)) +
           "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % kColors.size()];
    if (s.points) {
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
          out += "<circle cx=\"" + num(px(s.x[i])) + "\" cy=\"" + num(py(s.y[i])) +
                 "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
    } else {
      out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" points=\"";
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
          out += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
      out += "\"/>\n";
    }
    out += "<text x=\"" + num(kWidth - kMargin - 120) + "\" y=\"" + num(kMargin + 16 + 14 * double(k)) +
           "\" font-size=\"11\" fill=\"" + color + "\">" + s.name + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace nlpc

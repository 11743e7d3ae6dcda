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

#include "nlpc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "nlpc/error.hpp"

namespace nlpc {

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) throw Error(ErrorKind::kSize, "csv row width mismatch");
  rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  auto put_line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  put_line(header);
  for (const auto& row : rows) put_line(row);
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string format_number(long long v) { return std::to_string(v); }

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double population_std(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / double(v.size()));
}

GainTable gain_table(const std::vector<FrameGain>& frames, GroupBy by) {
  if (frames.empty()) throw Error(ErrorKind::kEmptyInput, "gain_table needs frames");
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
  std::vector<std::string> order;
  for (const FrameGain& f : frames) {
    if (f.label == FrameLabel::kSilence) continue;
    std::string key;
    switch (by) {
      case GroupBy::kAll: key = "all"; break;
      case GroupBy::kLabel: key = std::string(to_string(f.label)); break;
      case GroupBy::kSpeaker: key = f.speaker; break;
      case GroupBy::kSex: key = f.sex; break;
    }
    if (!groups.count(key)) order.push_back(key);
    groups[key].first.push_back(f.gp_lpc);
    groups[key].second.push_back(f.gp_nlpc);
  }
  GainTable table;
  if (groups.empty()) table.notes.push_back("no non-silence frames; every group omitted");
  std::sort(order.begin(), order.end());
  for (const std::string& key : order) {
    const auto& [lpc, nlpc] = groups[key];
    if (key.empty()) {
      table.notes.push_back("frames without group metadata omitted");
      continue;
    }
    table.groups.push_back({key, Eigen::Index(lpc.size()), mean(lpc), population_std(lpc),
                            mean(nlpc), population_std(nlpc)});
  }
  return table;
}

GainScatter gain_scatter(const std::vector<double>& gp_lpc, const std::vector<double>& gp_nlpc) {
  if (gp_lpc.size() != gp_nlpc.size()) throw Error(ErrorKind::kSize, "scatter axes differ");
  if (gp_lpc.size() < 2) throw Error(ErrorKind::kEmptyInput, "scatter needs two points");
  GainScatter s;
  s.gp_lpc = gp_lpc;
  s.gp_nlpc = gp_nlpc;
  const double mx = mean(gp_lpc);
  const double my = mean(gp_nlpc);
  double sxx = 0.0, sxy = 0.0;
  std::size_t above = 0;
  for (std::size_t i = 0; i < gp_lpc.size(); ++i) {
    sxx += (gp_lpc[i] - mx) * (gp_lpc[i] - mx);
    sxy += (gp_lpc[i] - mx) * (gp_nlpc[i] - my);
    if (gp_nlpc[i] > gp_lpc[i]) ++above;
  }
  s.fraction_above_diagonal = double(above) / double(gp_lpc.size());
  if (sxx == 0.0) {
    s.slope_defined = false;
    s.slope = std::nan("");
    s.intercept = my;
    return s;
  }
  s.slope = sxy / sxx;
  s.intercept = my - s.slope * mx;
  return s;
}

ResidualHistogram residual_histogram(const Eigen::Ref<const Eigen::VectorXd>& residual,
                                     int n_bins) {
  if (residual.size() == 0) throw Error(ErrorKind::kEmptyInput, "empty residual");
  if (n_bins < 2) throw Error(ErrorKind::kArgument, "need at least two bins");
  ResidualHistogram h;
  for (Eigen::Index i = 0; i < residual.size(); ++i) {
    if (residual[i] > 0.0) ++h.cp;
    else if (residual[i] < 0.0) ++h.cn;
    else ++h.zeros;
  }
  h.asymmetry = h.cp + h.cn > 0 ? double(std::abs(h.cp - h.cn)) / double(h.cp + h.cn) : 0.0;

  const double lo = residual.minCoeff();
  const double hi = residual.maxCoeff();
  if (lo == hi) {
    h.degenerate = true;
    h.edges = {lo, hi};
    h.counts = {residual.size()};
    return h;
  }
  const double width = (hi - lo) / n_bins;
  h.counts.assign(std::size_t(n_bins), 0);
  for (int b = 0; b <= n_bins; ++b) h.edges.push_back(b == n_bins ? hi : lo + b * width);
  for (Eigen::Index i = 0; i < residual.size(); ++i) {
    const auto bin = std::min<Eigen::Index>(Eigen::Index((residual[i] - lo) / width), n_bins - 1);
    ++h.counts[std::size_t(bin)];
  }
  return h;
}

TrainingCurves training_curves(const TrainTrace& lm, const TrainTrace& bp) {
  TrainingCurves c;
  const std::size_t rows = std::max(lm.sse_per_epoch.size(), bp.sse_per_epoch.size());
  auto column = [rows](const TrainTrace& t) {
    std::vector<double> col = t.sse_per_epoch;
    col.resize(rows, t.final_sse());
    return col;
  };
  c.lm = column(lm);
  c.bp = column(bp);
  return c;
}

InitSensitivityTable init_sensitivity_table(std::vector<InitSensitivityRow> rows) {
  InitSensitivityTable t;
  if (!rows.empty()) {
    const std::size_t n2 = rows.front().gp_h2.size();
    const std::size_t n4 = rows.front().gp_h4.size();
    for (const auto& r : rows)
      if (r.gp_h2.size() != n2 || r.gp_h4.size() != n4)
        throw Error(ErrorKind::kSize, "every frame needs the same number of initializations");
  }
  auto best = [](const std::vector<double>& v) {
    return v.empty() ? std::nan("") : *std::max_element(v.begin(), v.end());
  };
  for (const auto& r : rows) {
    t.best_h2.push_back(best(r.gp_h2));
    t.best_h4.push_back(best(r.gp_h4));
  }
  t.rows = std::move(rows);
  return t;
}

CsvTable to_csv(const GainTable& table) {
  CsvTable csv{{"group", "count", "mean_lpc_db", "std_lpc_db", "mean_nlpc_db", "std_nlpc_db"}, {}};
  for (const GainGroup& g : table.groups)
    csv.add_row({g.name, format_number(static_cast<long long>(g.count)), format_number(g.mean_lpc),
                 format_number(g.std_lpc), format_number(g.mean_nlpc), format_number(g.std_nlpc)});
  return csv;
}

CsvTable to_csv(const std::vector<FrameGain>& frames) {
  CsvTable csv{{"frame", "label", "speaker", "sex", "gp_lpc_db", "gp_nlpc_db"}, {}};
  for (const FrameGain& f : frames)
    csv.add_row({format_number(static_cast<long long>(f.frame_index)), std::string(to_string(f.label)),
                 f.speaker, f.sex, format_number(f.gp_lpc), format_number(f.gp_nlpc)});
  return csv;
}

CsvTable scatter_points_csv(const GainScatter& scatter, const std::vector<FrameGain>& frames) {
  CsvTable csv{{"frame", "label", "gp_lpc_db", "gp_nlpc_db"}, {}};
  for (std::size_t i = 0; i < scatter.gp_lpc.size(); ++i)
    csv.add_row({format_number(static_cast<long long>(frames[i].frame_index)),
                 std::string(to_string(frames[i].label)), format_number(scatter.gp_lpc[i]),
                 format_number(scatter.gp_nlpc[i])});
  return csv;
}

CsvTable scatter_fit_csv(const GainScatter& scatter) {
  CsvTable csv{{"points", "slope", "intercept", "slope_defined", "fraction_above_diagonal"}, {}};
  csv.add_row({format_number(static_cast<long long>(scatter.gp_lpc.size())),
               format_number(scatter.slope), format_number(scatter.intercept),
               scatter.slope_defined ? "1" : "0", format_number(scatter.fraction_above_diagonal)});
  return csv;
}

CsvTable to_csv(const TrainingCurves& curves) {
  CsvTable csv{{"epoch", "sse_lm", "sse_bp"}, {}};
  for (std::size_t i = 0; i < curves.lm.size(); ++i)
    csv.add_row({format_number(static_cast<long long>(i + 1)), format_number(curves.lm[i]),
                 format_number(curves.bp[i])});
  return csv;
}

CsvTable to_csv(const InitSensitivityTable& table) {
  CsvTable csv{{"frame", "gp_lpc_db"}, {}};
  const std::size_t n2 = table.rows.empty() ? 0 : table.rows.front().gp_h2.size();
  const std::size_t n4 = table.rows.empty() ? 0 : table.rows.front().gp_h4.size();
  for (std::size_t i = 0; i < n2; ++i) csv.header.push_back("h2_init" + std::to_string(i));
  for (std::size_t i = 0; i < n4; ++i) csv.header.push_back("h4_init" + std::to_string(i));
  csv.header.push_back("h2_best");
  csv.header.push_back("h4_best");
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::vector<std::string> cells{format_number(static_cast<long long>(row.frame_index)),
                                   format_number(row.gp_lpc)};
    for (double g : row.gp_h2) cells.push_back(format_number(g));
    for (double g : row.gp_h4) cells.push_back(format_number(g));
    cells.push_back(format_number(table.best_h2[r]));
    cells.push_back(format_number(table.best_h4[r]));
    csv.add_row(std::move(cells));
  }
  return csv;
}

}  // namespace nlpc

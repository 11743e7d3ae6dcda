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

#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "nlpc/mlp.hpp"
#include "nlpc/signal.hpp"

namespace nlpc {

/// Rectangular text table rendered as CSV; numbers use six significant digits.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string str() const;
};

std::string format_number(double v);
std::string format_number(long long v);

struct FrameGain {
  Eigen::Index frame_index = 0;
  FrameLabel label = FrameLabel::kVoiced;
  std::string speaker;
  std::string sex;
  double gp_lpc = 0.0;
  double gp_nlpc = 0.0;
};

enum class GroupBy { kAll, kLabel, kSpeaker, kSex };

struct GainGroup {
  std::string name;
  Eigen::Index count = 0;
  double mean_lpc = 0.0;
  double std_lpc = 0.0;
  double mean_nlpc = 0.0;
  double std_nlpc = 0.0;
};

struct GainTable {
  std::vector<GainGroup> groups;
  std::vector<std::string> notes;
};

/// Mean and population standard deviation per group; silence frames excluded.
GainTable gain_table(const std::vector<FrameGain>& frames, GroupBy by);

struct GainScatter {
  std::vector<double> gp_lpc;
  std::vector<double> gp_nlpc;
  double slope = 0.0;
  double intercept = 0.0;
  bool slope_defined = true;
  double fraction_above_diagonal = 0.0;
};

/// Least-squares fit of gp_nlpc on gp_lpc. With no spread in gp_lpc the
/// slope is undefined and an intercept-only fit is returned.
GainScatter gain_scatter(const std::vector<double>& gp_lpc, const std::vector<double>& gp_nlpc);

struct ResidualHistogram {
  std::vector<double> edges;  // counts.size() + 1
  std::vector<Eigen::Index> counts;
  Eigen::Index cp = 0;  // strictly positive
  Eigen::Index cn = 0;  // strictly negative
  Eigen::Index zeros = 0;
  double asymmetry = 0.0;
  bool degenerate = false;
};

ResidualHistogram residual_histogram(const Eigen::Ref<const Eigen::VectorXd>& residual,
                                     int n_bins = 25);

struct TrainingCurves {
  std::vector<double> lm;
  std::vector<double> bp;
};

/// Epoch-aligned SSE columns; the shorter run is padded with its last value.
TrainingCurves training_curves(const TrainTrace& lm, const TrainTrace& bp);

struct InitSensitivityRow {
  Eigen::Index frame_index = 0;
  double gp_lpc = 0.0;
  std::vector<double> gp_h2;  // one entry per initialization
  std::vector<double> gp_h4;
};

struct InitSensitivityTable {
  std::vector<InitSensitivityRow> rows;
  std::vector<double> best_h2;
  std::vector<double> best_h4;
};

InitSensitivityTable init_sensitivity_table(std::vector<InitSensitivityRow> rows);

CsvTable to_csv(const GainTable& table);
CsvTable to_csv(const std::vector<FrameGain>& frames);
CsvTable scatter_points_csv(const GainScatter& scatter, const std::vector<FrameGain>& frames);
CsvTable scatter_fit_csv(const GainScatter& scatter);
CsvTable to_csv(const TrainingCurves& curves);
CsvTable to_csv(const InitSensitivityTable& table);

double mean(const std::vector<double>& v);
double population_std(const std::vector<double>& v);

}  // namespace nlpc

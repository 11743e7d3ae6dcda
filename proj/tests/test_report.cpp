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


#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <doctest.h>

#include "nlpc/report.hpp"
#include "nlpc/svg.hpp"

using namespace nlpc;

namespace {

FrameGain fg(Eigen::Index i, FrameLabel label, double lpc, double nlpc, std::string speaker = "",
             std::string sex = "") {
  return {i, label, std::move(speaker), std::move(sex), lpc, nlpc};
}

double rss(const std::vector<double>& x, const std::vector<double>& y, double slope, double icpt) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::pow(y[i] - slope * x[i] - icpt, 2);
  return acc;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("gain table statistics") {
  const GainTable one = gain_table({fg(0, FrameLabel::kVoiced, 12.0, 14.0)}, GroupBy::kAll);
  REQUIRE(one.groups.size() == 1);
  CHECK(one.groups[0].mean_lpc == 12.0);
  CHECK(one.groups[0].std_lpc == 0.0);

  const GainTable two = gain_table(
      {fg(0, FrameLabel::kVoiced, 10.0, 11.0), fg(1, FrameLabel::kVoiced, 20.0, 25.0)}, GroupBy::kAll);
  CHECK(two.groups[0].mean_lpc == 15.0);
  CHECK(two.groups[0].std_lpc == 5.0);
  CHECK(two.groups[0].mean_nlpc == 18.0);
  CHECK(two.groups[0].std_nlpc == 7.0);
}

TEST_CASE("gain table grouping partitions non-silence frames") {
  const std::vector<FrameGain> frames{
      fg(0, FrameLabel::kVoiced, 1, 2, "ann", "f"), fg(1, FrameLabel::kUnvoiced, 3, 4, "bob", "m"),
      fg(2, FrameLabel::kSilence, 5, 6, "bob", "m"), fg(3, FrameLabel::kVoiced, 7, 8, "bob", "m"),
      fg(4, FrameLabel::kVoiced, 9, 10)};
  for (GroupBy by : {GroupBy::kAll, GroupBy::kLabel}) {
    Eigen::Index total = 0;
    for (const GainGroup& g : gain_table(frames, by).groups) total += g.count;
    CHECK(total == 4);
  }
  const GainTable by_sex = gain_table(frames, GroupBy::kSex);
  REQUIRE(by_sex.groups.size() == 2);
  CHECK(by_sex.groups[0].name == "f");
  CHECK(by_sex.groups[1].count == 2);
  CHECK(by_sex.notes.size() == 1);
  const GainTable silent = gain_table({fg(0, FrameLabel::kSilence, 1, 1)}, GroupBy::kAll);
  CHECK(silent.groups.empty());
  CHECK_FALSE(silent.notes.empty());
  CHECK_THROWS_AS(gain_table({}, GroupBy::kAll), Error);
}

TEST_CASE("scatter fits") {
  const GainScatter diag = gain_scatter({1, 2, 3}, {1, 2, 3});
  CHECK(diag.slope == doctest::Approx(1.0));
  CHECK(diag.intercept == doctest::Approx(0.0));
  CHECK(diag.fraction_above_diagonal == 0.0);

  const GainScatter line = gain_scatter({0, 1, 2}, {1, 2, 3});
  CHECK(line.slope == doctest::Approx(1.0));
  CHECK(line.intercept == doctest::Approx(1.0));
  CHECK(line.fraction_above_diagonal == 1.0);

  const GainScatter flat = gain_scatter({4, 4, 4}, {1, 2, 6});
  CHECK_FALSE(flat.slope_defined);
  CHECK(std::isnan(flat.slope));
  CHECK(flat.intercept == 3.0);
  CHECK_THROWS_AS(gain_scatter({1}, {1}), Error);
  CHECK_THROWS_AS(gain_scatter({1, 2}, {1}), Error);
}

TEST_CASE("scatter matches closed-form least squares and is optimal") {
  std::mt19937_64 rng(61);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
      x.push_back(15 + g(rng));
      y.push_back(0.8 * x.back() + 4 + g(rng));
    }
    Eigen::MatrixXd X(50, 2);
    Eigen::VectorXd Y(50);
    for (int i = 0; i < 50; ++i) {
      X(i, 0) = x[std::size_t(i)];
      X(i, 1) = 1.0;
      Y[i] = y[std::size_t(i)];
    }
    const Eigen::Vector2d beta = (X.transpose() * X).ldlt().solve(X.transpose() * Y);
    const GainScatter s = gain_scatter(x, y);
    CHECK(std::abs(s.slope - beta[0]) <= 1e-10);
    CHECK(std::abs(s.intercept - beta[1]) <= 1e-10);
    const double best = rss(x, y, s.slope, s.intercept);
    for (double ds : {-1e-3, 1e-3}) {
      CHECK(rss(x, y, s.slope + ds, s.intercept) >= best);
      CHECK(rss(x, y, s.slope, s.intercept + ds) >= best);
    }
  }
}

TEST_CASE("residual histogram") {
  const ResidualHistogram a = residual_histogram(Eigen::Vector2d(-1, 1));
  CHECK(a.cp == 1);
  CHECK(a.cn == 1);
  CHECK(a.asymmetry == 0.0);
  const ResidualHistogram b = residual_histogram(Eigen::Vector3d(1, 2, 3));
  CHECK(b.cp == 3);
  CHECK(b.cn == 0);
  CHECK(b.asymmetry == 1.0);

  std::mt19937_64 rng(62);
  Eigen::VectorXd r = Eigen::VectorXd::Random(333);
  r[5] = 0.0;
  const ResidualHistogram h25 = residual_histogram(r, 25);
  const ResidualHistogram h7 = residual_histogram(r, 7);
  Eigen::Index total = 0;
  for (auto c : h25.counts) total += c;
  CHECK(total == 333);
  CHECK(h25.edges.size() == 26);
  CHECK(h25.cp == h7.cp);
  CHECK(h25.cn == h7.cn);
  CHECK(h25.zeros == 1);

  const ResidualHistogram flat = residual_histogram(Eigen::VectorXd::Zero(4));
  CHECK(flat.degenerate);
  CHECK(flat.asymmetry == 0.0);
  CHECK_THROWS_AS(residual_histogram(Eigen::VectorXd()), Error);
}

TEST_CASE("training curves pad with the final value") {
  TrainTrace lm{10.0, {8.0, 5.0}, 0.0, 0};
  TrainTrace bp{10.0, {9.0, 8.5, 8.2, 8.0}, 0.0, 0};
  const TrainingCurves c = training_curves(lm, bp);
  CHECK(c.lm == std::vector<double>{8.0, 5.0, 5.0, 5.0});
  CHECK(c.bp.size() == 4);
  CHECK(c.lm.back() <= c.lm.front());
  CHECK(to_csv(c).rows.size() == 4);
}

TEST_CASE("init sensitivity table") {
  std::vector<InitSensitivityRow> rows{{3, 10.0, {11, 14, 12}, {15, 13, 16}},
                                       {4, 11.0, {9, 8, 10}, {12, 12, 11}}};
  const InitSensitivityTable t = init_sensitivity_table(rows);
  CHECK(t.best_h2 == std::vector<double>{14, 10});
  CHECK(t.best_h4 == std::vector<double>{16, 12});
  const CsvTable csv = to_csv(t);
  CHECK(csv.header.size() == 2 + 3 + 3 + 2);
  CHECK(csv.rows.size() == 2);
  CHECK(csv.rows[1][0] == "4");
  rows[1].gp_h2.pop_back();
  CHECK_THROWS_AS(init_sensitivity_table(rows), Error);
}

TEST_CASE("csv formatting") {
  CHECK(format_number(1.0 / 3.0) == "0.333333");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(42LL) == "42");
  CsvTable t{{"a", "b"}, {}};
  t.add_row({"1", "2"});
  CHECK(t.str() == "a,b\n1,2\n");
  CHECK_THROWS_AS(t.add_row({"1"}), Error);
  CHECK(mean({}) == 0.0);
  CHECK(population_std({2.0, 4.0}) == 1.0);
}

TEST_CASE("svg chart skips non-finite points") {
  const std::string svg =
      svg_chart("t", {{"s", {0, 1, 2}, {1, std::nan(""), 3}, false}}, true);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("nan") == std::string::npos);
}

}

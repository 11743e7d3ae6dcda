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
#include <set>
#include <vector>

#include <doctest.h>

#include "nlpc/lattice.hpp"
#include "nlpc/quant.hpp"
#include "oracles.hpp"

using namespace nlpc;

namespace {

// Explicit level list for a midrise quantizer and nearest-level lookup.
std::vector<double> midrise_levels(int bits, double range) {
  const double step = 2.0 * range / std::pow(2.0, bits);
  std::vector<double> levels;
  for (int m = -(1 << (bits - 1)); m < (1 << (bits - 1)); ++m) levels.push_back((m + 0.5) * step);
  return levels;
}

double nearest(const std::vector<double>& levels, double v) {
  double best = levels.front();
  for (double l : levels)
    if (std::abs(l - v) < std::abs(best - v)) best = l;
  return best;
}

struct Trained {
  Frame frame;
  LpcModel lpc;
  MlpPredictor net;
};

Trained trained_frame(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Trained t;
  t.frame = oracle::ar2_frame(rng, 12, 200, 0.97, 0.25);
  t.lpc = analyze_lpc(t.frame.body);
  TrainConfig cfg;
  cfg.n_inits = 2;
  t.net = train_multi_init(t.frame, cfg).best;
  return t;
}

}  // namespace

TEST_SUITE("quant") {

TEST_CASE("quantizer examples") {
  const UniformQuantizer one{1, 1.0};
  CHECK(quantize(one, 0.01) == 0.5);
  CHECK(quantize(one, 0.99) == 0.5);
  CHECK(quantize(one, -0.01) == -0.5);
  const UniformQuantizer three{3, 1.0};
  CHECK(quantize(three, 0.3) == 0.375);
  CHECK(quantize(three, 5.0) == 0.875);
  CHECK(quantize(three, -5.0) == -0.875);
  CHECK(three.step() == 0.25);
  const UniformQuantizer tread{3, 1.0, QuantizerStyle::kMidtread};
  CHECK(quantize(tread, 0.1) == 0.0);
  CHECK(quantize(tread, 0.3) == 0.25);
}

TEST_CASE("quantizer matches level enumeration and its properties") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(-1.3, 1.3);
  for (int bits = 1; bits <= 8; ++bits) {
    const double range = 1.3;
    const UniformQuantizer q{bits, range};
    const auto levels = midrise_levels(bits, range);
    std::set<double> seen;
    double previous_in = -10.0, previous_out = -10.0;
    std::vector<double> values;
    for (int i = 0; i < 2000; ++i) values.push_back(u(rng));
    std::sort(values.begin(), values.end());
    for (double v : values) {
      const double out = quantize(q, v);
      // Ties between two levels cannot occur away from cell boundaries.
      CHECK(out == doctest::Approx(nearest(levels, v)).epsilon(1e-12));
      CHECK(std::abs(out - v) <= q.step() / 2 + 1e-15);
      CHECK(quantize(q, out) == out);
      if (v >= previous_in) CHECK(out >= previous_out);
      previous_in = v;
      previous_out = out;
      seen.insert(out);
    }
    CHECK(seen.size() <= levels.size());
  }
}

TEST_CASE("matrix quantization is entrywise") {
  std::mt19937_64 rng(52);
  const Eigen::MatrixXd m = Eigen::MatrixXd::Random(3, 4);
  const UniformQuantizer q{5, 1.0};
  const Eigen::MatrixXd out = quantize(q, m);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) CHECK(out(i, j) == quantize(q, m(i, j)));
}

TEST_CASE("predictor parameter quantization") {
  std::mt19937_64 rng(53);
  const MlpPredictor net = oracle::random_net(rng, 2, 10, 2.0);
  const double A = net.w1.cwiseAbs().maxCoeff();

  const QuantizedMlp q16 = quantize_predictor_params(net, 16);
  CHECK((q16.net.w1 - net.w1).cwiseAbs().maxCoeff() < A * std::pow(2.0, -15));
  CHECK(q16.net.w2 == net.w2);
  CHECK(q16.net.b1 == net.b1);
  CHECK(q16.ranges == std::vector<double>{A});

  const QuantizedMlp q1 = quantize_predictor_params(net, 1);
  CHECK((q1.net.w1.cwiseAbs().array() == A / 2).all());

  const QuantizedMlp q7 = quantize_predictor_params(net, 7);
  const UniformQuantizer ref{7, A};
  for (Eigen::Index j = 0; j < 2; ++j)
    for (Eigen::Index i = 0; i < 10; ++i) CHECK(q7.net.w1(j, i) == quantize(ref, net.w1(j, i)));

  const QuantizedMlp all = quantize_predictor_params(net, 7, true);
  CHECK(all.ranges.size() == 4);
  CHECK(all.net.w2 != net.w2);

  const QuantizedMlp zero = quantize_predictor_params(MlpPredictor::zeros(2, 10), 4);
  CHECK(zero.degenerate);
  CHECK(zero.net.w1.isZero(0.0));

  LpcModel lpc;
  lpc.a = Eigen::VectorXd::LinSpaced(12, -0.8, 1.1);
  const QuantizedLpc ql = quantize_predictor_params(lpc, 6);
  CHECK(ql.range == doctest::Approx(1.1));
  for (Eigen::Index i = 0; i < 12; ++i) CHECK(ql.model.a[i] == quantize(UniformQuantizer{6, 1.1}, lpc.a[i]));
  LpcModel flat;
  flat.a = Eigen::VectorXd::Zero(12);
  CHECK(quantize_predictor_params(flat, 6).degenerate);
}

TEST_CASE("nn_synthesize inverse, zero net and hand-unrolled recursion") {
  const Trained t = trained_frame(54);
  const FramePrediction fp = mlp_predict_frame(t.net, t.frame);
  const NnSynthesis rec = nn_synthesize(t.net, fp.residual, t.frame.history);
  CHECK_FALSE(rec.clamped);
  CHECK((rec.samples - t.frame.body).cwiseAbs().maxCoeff() <= 1e-10);

  const Eigen::VectorXd e = Eigen::VectorXd::LinSpaced(7, -1, 1);
  CHECK(nn_synthesize(MlpPredictor::zeros(2, 10), e, Eigen::VectorXd::Ones(12)).samples == e);

  // Three steps by hand with a 1-hidden, 2-input net.
  MlpPredictor tiny = MlpPredictor::zeros(1, 2);
  tiny.w1 << 0.8, -0.3;
  tiny.b1[0] = 0.1;
  tiny.w2[0] = 1.5;
  tiny.b2 = -0.7;
  const Eigen::Vector2d hist(0.2, 0.4);  // oldest first
  const Eigen::Vector3d exc(0.05, -0.1, 0.2);
  auto f = [&](double x1, double x2) { return 1.5 / (1.0 + std::exp(-(0.8 * x1 - 0.3 * x2 + 0.1))) - 0.7; };
  const double y0 = f(0.4, 0.2) + 0.05;
  const double y1 = f(y0, 0.4) - 0.1;
  const double y2 = f(y1, y0) + 0.2;
  const NnSynthesis s = nn_synthesize(tiny, exc, hist);
  CHECK(s.samples[0] == doctest::Approx(y0).epsilon(1e-15));
  CHECK(s.samples[1] == doctest::Approx(y1).epsilon(1e-15));
  CHECK(s.samples[2] == doctest::Approx(y2).epsilon(1e-15));

  MlpPredictor blow = MlpPredictor::zeros(1, 2);
  blow.w2[0] = std::numeric_limits<double>::infinity();
  const NnSynthesis c = nn_synthesize(blow, exc, hist);
  CHECK(c.clamped);
  CHECK(c.samples.cwiseAbs().maxCoeff() == 10.0);
  CHECK_THROWS_AS(nn_synthesize(tiny, exc, Eigen::VectorXd::Zero(1)), Error);
}

TEST_CASE("sweeps reach the lossless limit") {
  const Trained t = trained_frame(55);
  const QuantSweepResult a = analysis_gain_sweep(t.frame, t.lpc, t.net, {4, 9, 16, 20, 24, 32});
  REQUIRE(a.bits_axis.size() == 6);
  CHECK(a.gp_lpc.size() == 6);
  CHECK(std::abs(a.gp_lpc[2] - a.gp_lpc_unquantized) <= 0.01);
  CHECK(std::abs(a.gp_nlpc[2] - a.gp_nlpc_unquantized) <= 0.01);
  for (std::size_t i = 3; i < 6; ++i) {
    CHECK(std::abs(a.gp_lpc[i] - a.gp_lpc_unquantized) <= 1e-4);
    CHECK(std::abs(a.gp_nlpc[i] - a.gp_nlpc_unquantized) <= 1e-4);
  }

  const QuantSweepResult s = synthesis_gain_sweep(t.frame, t.lpc, t.net, {52});
  CHECK(s.gp_lpc_unquantized > 150.0);
  CHECK(s.gp_nlpc_unquantized > 150.0);
  CHECK(s.mode == SweepMode::kAnalysisSynthesis);
  // 52 bits leaves only round-off in the reconstruction.
  CHECK(s.gp_lpc[0] > 150.0);
  CHECK(s.gp_nlpc[0] > 150.0);
}

TEST_CASE("coarse LPC quantization can destabilize synthesis") {
  // Sharp resonance close to the unit circle: 2 bits leaves the pole outside.
  LpcModel lpc;
  lpc.a = Eigen::VectorXd::Zero(12);
  lpc.a[0] = 1.98 * std::cos(0.05);
  lpc.a[1] = -0.99 * 0.99;
  lpc.k = -fir_to_lattice(lpc.a);
  std::mt19937_64 rng(56);
  Frame f;
  f.history = Eigen::VectorXd::Zero(12);
  f.body = oracle::random_vector(rng, 200, 0.1);
  const QuantSweepResult s = synthesis_gain_sweep(f, lpc, MlpPredictor::zeros(2, 10), {2, 24});
  CHECK(s.lpc_diverged[0]);
  CHECK(std::isinf(s.gp_lpc[0]));
  CHECK_FALSE(s.lpc_diverged[1]);
  CHECK_FALSE(s.nlpc_diverged[0]);
}

TEST_CASE("useful_duration rule") {
  Eigen::VectorXd err = Eigen::VectorXd::Zero(100);
  CHECK(useful_duration(err, 1.0, 20) == 100);
  err.segment(10, 19).setConstant(2.0);  // too short to count
  CHECK(useful_duration(err, 1.0, 20) == 100);
  err.segment(50, 20).setConstant(2.0);
  CHECK(useful_duration(err, 1.0, 20) == 50);
  err[60] = 1.0;  // not strictly above the threshold
  CHECK(useful_duration(err, 1.0, 20) == 100);
}

TEST_CASE("residual quantization experiment") {
  const Trained t = trained_frame(57);
  // Small weights keep the closed loop contractive.
  std::mt19937_64 rng(58);
  const MlpPredictor calm = oracle::random_net(rng, 2, 10, 0.1);
  const ResidualQuantResult hi = residual_quant_experiment(t.frame, t.lpc, calm, 30);
  CHECK_FALSE(hi.lpc.broke_down);
  CHECK_FALSE(hi.nlpc.broke_down);
  CHECK(hi.lpc.useful_duration == 200);
  CHECK(hi.lpc.reconstruction_error.size() == 200);
  CHECK(hi.lpc.reconstruction_error.maxCoeff() < 1e-6);
  CHECK(hi.nlpc.reconstruction_error.maxCoeff() < 1e-6);

  const ResidualQuantResult a = residual_quant_experiment(t.frame, t.lpc, t.net, 6);
  const ResidualQuantResult b = residual_quant_experiment(t.frame, t.lpc, t.net, 6);
  CHECK(a.nlpc.useful_duration == b.nlpc.useful_duration);
  CHECK(a.nlpc.reconstruction_error == b.nlpc.reconstruction_error);
  CHECK(a.lpc.step == doctest::Approx(2.0 * lpc_residual(t.lpc, t.frame).cwiseAbs().maxCoeff() / 64.0));
  for (const OscillationResult* r : {&a.lpc, &a.nlpc}) {
    CHECK(r->useful_duration <= 200);
    CHECK(r->broke_down == (r->useful_duration < 200));
  }
}

}

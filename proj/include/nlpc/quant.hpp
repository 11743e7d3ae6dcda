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

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "nlpc/lpc.hpp"
#include "nlpc/mlp.hpp"
#include "nlpc/signal.hpp"

namespace nlpc {

enum class QuantizerStyle { kMidrise, kMidtread };

/// Uniform scalar quantizer over [-range, range] with 2^bits cells.
struct UniformQuantizer {
  int bits = 8;
  double range = 1.0;
  QuantizerStyle style = QuantizerStyle::kMidrise;

  double step() const { return std::ldexp(2.0 * range, -bits); }
};

/// Midrise levels are ±(2m+1)·step/2; values outside the range clamp to the
/// outermost level. Midtread levels are m·step.
double quantize(const UniformQuantizer& q, double v);

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> quantize(
    const UniformQuantizer& q, const Eigen::MatrixBase<Derived>& values) {
  return values.unaryExpr([&q](typename Derived::Scalar v) {
    return typename Derived::Scalar(quantize(q, double(v)));
  });
}

struct QuantizedMlp {
  MlpPredictor net;
  std::vector<double> ranges;  // one per quantized group, sent as side information
  bool degenerate = false;     // some group was all zero and passed through
};

struct QuantizedLpc {
  LpcModel model;  // k recomputed from the quantized a; NaN where the step-down is singular
  double range = 0.0;
  bool degenerate = false;
};

/// Quantizes the first-layer weights with range max|w1| (every layer, each
/// with its own range, when `all_layers`).
QuantizedMlp quantize_predictor_params(const MlpPredictor& net, int bits,
                                       bool all_layers = false,
                                       QuantizerStyle style = QuantizerStyle::kMidrise);

/// Quantizes every a_i with range max|a_i|.
QuantizedLpc quantize_predictor_params(const LpcModel& model, int bits,
                                       QuantizerStyle style = QuantizerStyle::kMidrise);

enum class SweepMode { kAnalysis, kAnalysisSynthesis };

struct QuantSweepResult {
  SweepMode mode = SweepMode::kAnalysis;
  std::vector<int> bits_axis;
  std::vector<double> gp_lpc;
  std::vector<double> gp_nlpc;
  std::vector<bool> lpc_diverged;
  std::vector<bool> nlpc_diverged;
  double gp_lpc_unquantized = 0.0;
  double gp_nlpc_unquantized = 0.0;
};

struct SweepOptions {
  bool all_layers = false;
  QuantizerStyle style = QuantizerStyle::kMidrise;
};

/// Open-loop gains with quantized parameters at every bit depth.
QuantSweepResult analysis_gain_sweep(const Frame& frame, const LpcModel& lpc,
                                     const MlpPredictor& net, const std::vector<int>& bits,
                                     const SweepOptions& options = {});

/// Residual from unquantized parameters, reconstruction with quantized ones;
/// the gain is measured on the reconstruction error x - x_rec. A diverged
/// synthesis reports -infinity.
QuantSweepResult synthesis_gain_sweep(const Frame& frame, const LpcModel& lpc,
                                      const MlpPredictor& net, const std::vector<int>& bits,
                                      const SweepOptions& options = {});

/// Synthesis output is non-finite or carries more than `energy_factor` times
/// the reference energy.
bool detect_divergence(const Eigen::Ref<const Eigen::VectorXd>& output, double reference_energy,
                       double energy_factor = 100.0);

struct NnSynthesis {
  Eigen::VectorXd samples;
  bool clamped = false;  // a non-finite value was replaced by ±10
};

/// Closed loop x_rec[n] = mlp_forward(x_rec[n-1..n-N]) + excitation[n].
NnSynthesis nn_synthesize(const MlpPredictor& net,
                          const Eigen::Ref<const Eigen::VectorXd>& excitation,
                          const Eigen::Ref<const Eigen::VectorXd>& history);

struct OscillationResult {
  int bits = 0;
  double step = 0.0;
  Eigen::VectorXd reconstruction_error;
  Eigen::Index useful_duration = 0;
  bool broke_down = false;
};

struct BreakdownRule {
  double step_multiple = 8.0;
  Eigen::Index sustain = 20;
};

/// First index where |error| > threshold for `sustain` consecutive samples,
/// or error.size() when that never happens.
Eigen::Index useful_duration(const Eigen::Ref<const Eigen::VectorXd>& error, double threshold,
                             Eigen::Index sustain);

struct ResidualQuantResult {
  OscillationResult lpc;
  OscillationResult nlpc;
};

/// Quantizes each predictor's residual over window[start..] with range
/// max|e| and reconstructs in closed loop from the true history.
ResidualQuantResult residual_quant_experiment(const Eigen::Ref<const Eigen::VectorXd>& window,
                                              Eigen::Index start, const LpcModel& lpc,
                                              const MlpPredictor& net, int bits,
                                              const BreakdownRule& rule = {});

ResidualQuantResult residual_quant_experiment(const Frame& frame, const LpcModel& lpc,
                                              const MlpPredictor& net, int bits,
                                              const BreakdownRule& rule = {});

}  // namespace nlpc

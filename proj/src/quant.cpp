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

#include "nlpc/quant.hpp"

#include <algorithm>
#include <limits>

#include "nlpc/lattice.hpp"

namespace nlpc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double gain_db(const Eigen::VectorXd& body, const Eigen::VectorXd& error) {
  return prediction_gain(body, error).gp_db;
}

template <typename Derived>
std::pair<Eigen::MatrixXd, double> quantize_group(const Eigen::MatrixBase<Derived>& values,
                                                  int bits, QuantizerStyle style, bool& degenerate) {
  const double range = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
  if (!(range > 0.0)) {
    degenerate = true;
    return {values, 0.0};
  }
  return {quantize(UniformQuantizer{bits, range, style}, values), range};
}

}  // namespace

double quantize(const UniformQuantizer& q, double v) {
  const double step = q.step();
  const double top = std::ldexp(1.0, q.bits - 1);
  if (q.style == QuantizerStyle::kMidtread) {
    const double idx = std::clamp(std::round(v / step), -(top - 1.0), top - 1.0);
    return idx * step;
  }
  const double idx = std::clamp(std::floor(v / step), -top, top - 1.0);
  return (idx + 0.5) * step;
}

QuantizedMlp quantize_predictor_params(const MlpPredictor& net, int bits, bool all_layers,
                                       QuantizerStyle style) {
  QuantizedMlp out;
  out.net = net;
  auto [w1, r1] = quantize_group(net.w1, bits, style, out.degenerate);
  out.net.w1 = w1;
  out.ranges.push_back(r1);
  if (all_layers) {
    auto [b1, rb1] = quantize_group(net.b1, bits, style, out.degenerate);
    auto [w2, rw2] = quantize_group(net.w2, bits, style, out.degenerate);
    Eigen::Matrix<double, 1, 1> bias(net.b2);
    auto [b2, rb2] = quantize_group(bias, bits, style, out.degenerate);
    out.net.b1 = b1;
    out.net.w2 = w2;
    out.net.b2 = b2(0, 0);
    out.ranges.insert(out.ranges.end(), {rb1, rw2, rb2});
  }
  return out;
}

QuantizedLpc quantize_predictor_params(const LpcModel& model, int bits, QuantizerStyle style) {
  QuantizedLpc out;
  out.model = model;
  auto [a, range] = quantize_group(model.a, bits, style, out.degenerate);
  out.model.a = a;
  out.range = range;
  try {
    // The lattice module works with α = -a, so its K carries the opposite sign.
    out.model.k = -fir_to_lattice(out.model.a);
  } catch (const Error&) {
    out.model.k.setConstant(std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

bool detect_divergence(const Eigen::Ref<const Eigen::VectorXd>& output, double reference_energy,
                       double energy_factor) {
  if (!output.allFinite()) return true;
  return output.squaredNorm() > energy_factor * reference_energy;
}

QuantSweepResult analysis_gain_sweep(const Frame& frame, const LpcModel& lpc,
                                     const MlpPredictor& net, const std::vector<int>& bits,
                                     const SweepOptions& options) {
  QuantSweepResult out;
  out.mode = SweepMode::kAnalysis;
  out.gp_lpc_unquantized = gain_db(frame.body, lpc_residual(lpc, frame));
  out.gp_nlpc_unquantized = gain_db(frame.body, mlp_predict_frame(net, frame).residual);
  for (int b : bits) {
    const QuantizedLpc ql = quantize_predictor_params(lpc, b, options.style);
    const QuantizedMlp qn = quantize_predictor_params(net, b, options.all_layers, options.style);
    out.bits_axis.push_back(b);
    out.gp_lpc.push_back(gain_db(frame.body, lpc_residual(ql.model, frame)));
    out.gp_nlpc.push_back(gain_db(frame.body, mlp_predict_frame(qn.net, frame).residual));
    out.lpc_diverged.push_back(false);
    out.nlpc_diverged.push_back(false);
  }
  return out;
}

QuantSweepResult synthesis_gain_sweep(const Frame& frame, const LpcModel& lpc,
                                      const MlpPredictor& net, const std::vector<int>& bits,
                                      const SweepOptions& options) {
  QuantSweepResult out;
  out.mode = SweepMode::kAnalysisSynthesis;
  const Eigen::VectorXd e_lpc = lpc_residual(lpc, frame);
  const Eigen::VectorXd e_nn = mlp_predict_frame(net, frame).residual;
  const double body_energy = frame.body.squaredNorm();
  out.gp_lpc_unquantized =
      gain_db(frame.body, frame.body - lpc_synthesize(lpc, e_lpc, frame.history));
  out.gp_nlpc_unquantized = gain_db(
      frame.body, frame.body - nn_synthesize(net, e_nn, frame.history).samples);

  for (int b : bits) {
    out.bits_axis.push_back(b);
    const QuantizedLpc ql = quantize_predictor_params(lpc, b, options.style);
    const Eigen::VectorXd rec_lpc = lpc_synthesize(ql.model, e_lpc, frame.history);
    const bool lpc_bad = detect_divergence(rec_lpc, body_energy);
    out.lpc_diverged.push_back(lpc_bad);
    out.gp_lpc.push_back(lpc_bad ? kNegInf : gain_db(frame.body, frame.body - rec_lpc));

    const QuantizedMlp qn = quantize_predictor_params(net, b, options.all_layers, options.style);
    const NnSynthesis rec_nn = nn_synthesize(qn.net, e_nn, frame.history);
    const bool nn_bad = rec_nn.clamped || detect_divergence(rec_nn.samples, body_energy);
    out.nlpc_diverged.push_back(nn_bad);
    out.gp_nlpc.push_back(nn_bad ? kNegInf
                                 : gain_db(frame.body, frame.body - rec_nn.samples));
  }
  return out;
}

NnSynthesis nn_synthesize(const MlpPredictor& net,
                          const Eigen::Ref<const Eigen::VectorXd>& excitation,
                          const Eigen::Ref<const Eigen::VectorXd>& history) {
  const Eigen::Index n_in = net.n_inputs();
  if (history.size() < n_in)
    throw Error(ErrorKind::kSize, "history shorter than network input count");
  Eigen::VectorXd y(n_in + excitation.size());
  y.head(n_in) = history.tail(n_in);
  NnSynthesis out;
  Eigen::VectorXd taps(n_in);
  for (Eigen::Index n = 0; n < excitation.size(); ++n) {
    for (Eigen::Index i = 0; i < n_in; ++i) taps[i] = y[n_in + n - 1 - i];
    double v = mlp_forward(net, taps) + excitation[n];
    if (!std::isfinite(v)) {
      v = std::signbit(v) ? -10.0 : 10.0;
      out.clamped = true;
    }
    y[n_in + n] = v;
  }
  out.samples = y.tail(excitation.size());
  return out;
}

Eigen::Index useful_duration(const Eigen::Ref<const Eigen::VectorXd>& error, double threshold,
                             Eigen::Index sustain) {
  Eigen::Index run = 0;
  for (Eigen::Index n = 0; n < error.size(); ++n) {
    run = std::abs(error[n]) > threshold ? run + 1 : 0;
    if (run >= sustain) return n - sustain + 1;
  }
  return error.size();
}

namespace {

OscillationResult finish(int bits, double step, const Eigen::VectorXd& target,
                         const Eigen::VectorXd& reconstruction, const BreakdownRule& rule) {
  OscillationResult r;
  r.bits = bits;
  r.step = step;
  r.reconstruction_error = (target - reconstruction).cwiseAbs();
  if (!r.reconstruction_error.allFinite())
    r.reconstruction_error = r.reconstruction_error.unaryExpr(
        [](double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::max(); });
  r.useful_duration = useful_duration(r.reconstruction_error, rule.step_multiple * step, rule.sustain);
  r.broke_down = r.useful_duration < target.size();
  return r;
}

std::pair<Eigen::VectorXd, double> quantize_residual(const Eigen::VectorXd& e, int bits) {
  const double range = e.size() ? e.cwiseAbs().maxCoeff() : 0.0;
  if (!(range > 0.0)) return {e, 0.0};
  const UniformQuantizer q{bits, range, QuantizerStyle::kMidrise};
  return {quantize(q, e), q.step()};
}

}  // namespace

ResidualQuantResult residual_quant_experiment(const Eigen::Ref<const Eigen::VectorXd>& window,
                                              Eigen::Index start, const LpcModel& lpc,
                                              const MlpPredictor& net, int bits,
                                              const BreakdownRule& rule) {
  const Eigen::VectorXd target = window.tail(window.size() - start);
  const Eigen::VectorXd history = window.head(start);

  ResidualQuantResult out;
  const auto [q_lpc, step_lpc] = quantize_residual(fir_residual(lpc.a, window, start), bits);
  out.lpc = finish(bits, step_lpc, target, lpc_synthesize(lpc, q_lpc, history), rule);

  const auto [q_nn, step_nn] = quantize_residual(mlp_predict_window(net, window, start).residual, bits);
  out.nlpc = finish(bits, step_nn, target, nn_synthesize(net, q_nn, history).samples, rule);
  return out;
}

ResidualQuantResult residual_quant_experiment(const Frame& frame, const LpcModel& lpc,
                                              const MlpPredictor& net, int bits,
                                              const BreakdownRule& rule) {
  return residual_quant_experiment(frame.window(), frame.history.size(), lpc, net, bits, rule);
}

}  // namespace nlpc

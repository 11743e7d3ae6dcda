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

#include "nlpc/mlp.hpp"

#include <array>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>

#include "nlpc/lpc.hpp"

namespace nlpc {
namespace {

struct Batch {
  Eigen::MatrixXd taps;  // T x N
  Eigen::VectorXd target;
};

Batch make_batch(const Frame& frame, Eigen::Index n_inputs) {
  if (frame.history.size() < n_inputs)
    throw Error(ErrorKind::kSize, "frame history shorter than network input count");
  const Eigen::VectorXd window = frame.window();
  return {tap_matrix(window, frame.history.size(), n_inputs), frame.body};
}

Eigen::VectorXd batch_predict(const MlpPredictor& net, const Eigen::MatrixXd& taps) {
  const Eigen::MatrixXd activation =
      (taps * net.w1.transpose()).rowwise() + net.b1.transpose();
  const Eigen::MatrixXd hidden = activation.unaryExpr([](double a) { return sigmoid(a); });
  return (hidden * net.w2).array() + net.b2;
}

// Residual Jacobian over a precomputed batch.
ResidualJacobian batch_jacobian(const MlpPredictor& net, const Batch& batch) {
  const Eigen::Index rows = batch.taps.rows();
  const Eigen::Index n_hidden = net.n_hidden();
  const Eigen::Index n_inputs = net.n_inputs();
  const Eigen::MatrixXd activation =
      (batch.taps * net.w1.transpose()).rowwise() + net.b1.transpose();
  const Eigen::MatrixXd hidden = activation.unaryExpr([](double a) { return sigmoid(a); });

  ResidualJacobian out;
  out.residual = batch.target - ((hidden * net.w2).array() + net.b2).matrix();
  out.jacobian.resize(rows, net.n_params());
  const Eigen::Index bias_col = n_hidden * n_inputs;
  for (Eigen::Index j = 0; j < n_hidden; ++j) {
    // ∂x̂/∂a_j = w2_j s_j (1 - s_j)
    const Eigen::VectorXd slope =
        net.w2[j] * (hidden.col(j).array() * (1.0 - hidden.col(j).array())).matrix();
    for (Eigen::Index i = 0; i < n_inputs; ++i)
      out.jacobian.col(j * n_inputs + i) = -(slope.array() * batch.taps.col(i).array()).matrix();
    out.jacobian.col(bias_col + j) = -slope;
    out.jacobian.col(bias_col + n_hidden + j) = -hidden.col(j);
  }
  out.jacobian.col(net.n_params() - 1).setConstant(-1.0);
  return out;
}

double frame_gain_db(const Frame& frame, double sse) {
  const double energy = frame.body.squaredNorm();
  if (!(energy > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(energy / sse);
}

}  // namespace

Eigen::MatrixXd tap_matrix(const Eigen::Ref<const Eigen::VectorXd>& window, Eigen::Index start,
                           Eigen::Index n_inputs) {
  if (start < n_inputs) throw Error(ErrorKind::kSize, "history shorter than network input count");
  const Eigen::Index rows = window.size() - start;
  Eigen::MatrixXd taps(rows, n_inputs);
  for (Eigen::Index n = 0; n < rows; ++n)
    for (Eigen::Index i = 0; i < n_inputs; ++i) taps(n, i) = window[start + n - 1 - i];
  return taps;
}

FramePrediction mlp_predict_window(const MlpPredictor& net,
                                   const Eigen::Ref<const Eigen::VectorXd>& window,
                                   Eigen::Index start) {
  FramePrediction out;
  out.predictions = batch_predict(net, tap_matrix(window, start, net.n_inputs()));
  out.residual = window.tail(window.size() - start) - out.predictions;
  return out;
}

FramePrediction mlp_predict_frame(const MlpPredictor& net, const Frame& frame) {
  if (frame.history.size() < net.n_inputs())
    throw Error(ErrorKind::kSize, "frame history shorter than network input count");
  return mlp_predict_window(net, frame.window(), frame.history.size());
}

ResidualJacobian mlp_jacobian(const MlpPredictor& net, const Frame& frame) {
  return batch_jacobian(net, make_batch(frame, net.n_inputs()));
}

Eigen::VectorXd sse_gradient(const MlpPredictor& net, const Frame& frame) {
  const ResidualJacobian rj = mlp_jacobian(net, frame);
  return 2.0 * rj.jacobian.transpose() * rj.residual;
}

void TrainConfig::validate() const {
  if (epochs <= 0) throw Error(ErrorKind::kArgument, "epochs must be positive");
  if (n_inits <= 0) throw Error(ErrorKind::kArgument, "n_inits must be positive");
  if (n_hidden <= 0 || n_inputs <= 0)
    throw Error(ErrorKind::kArgument, "network dimensions must be positive");
  if (!(lm_mu0 > 0.0)) throw Error(ErrorKind::kArgument, "lm_mu0 must be positive");
  if (!(lm_mu_dec > 0.0 && lm_mu_dec < 1.0 && lm_mu_inc > 1.0))
    throw Error(ErrorKind::kArgument, "need 0 < lm_mu_dec < 1 < lm_mu_inc");
  if (!(bp_learning_rate >= 0.0))
    throw Error(ErrorKind::kArgument, "learning rate must be non-negative");
}

std::uint64_t init_seed(std::uint64_t rng_seed, Eigen::Index frame_index, int init_index) {
  std::seed_seq seq{std::uint32_t(rng_seed), std::uint32_t(rng_seed >> 32),
                    std::uint32_t(frame_index), std::uint32_t(init_index)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (std::uint64_t(words[0]) << 32) | words[1];
}

MlpPredictor random_init(Eigen::Index n_hidden, Eigen::Index n_inputs, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  // Explicit 53-bit mapping keeps draws identical across standard libraries.
  auto draw = [&gen] { return double(gen() >> 11) * 0x1.0p-53 - 0.5; };
  MlpPredictor net = MlpPredictor::zeros(n_hidden, n_inputs);
  Eigen::VectorXd p(net.n_params());
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = draw();
  net.set_params(p);
  return net;
}

TrainResult train_lm(const Frame& frame, const TrainConfig& cfg, const MlpPredictor& init) {
  cfg.validate();
  const Batch batch = make_batch(frame, init.n_inputs());
  MlpPredictor net = init;
  ResidualJacobian rj = batch_jacobian(net, batch);
  double sse = rj.residual.squaredNorm();

  TrainResult result;
  result.trace.initial_sse = sse;
  double mu = cfg.lm_mu0;
  bool stalled = false;
  for (int epoch = 0; epoch < cfg.epochs && !stalled; ++epoch) {
    const Eigen::MatrixXd normal = rj.jacobian.transpose() * rj.jacobian;
    const Eigen::VectorXd gradient = rj.jacobian.transpose() * rj.residual;
    bool accepted = false;
    bool solved_once = false;
    while (!accepted) {
      if (mu > cfg.lm_mu_max) {
        stalled = true;
        break;
      }
      Eigen::MatrixXd damped = normal;
      damped.diagonal().array() += mu;
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
      const Eigen::VectorXd step = ldlt.solve(-gradient);
      if (ldlt.info() != Eigen::Success || !step.allFinite()) {
        mu *= cfg.lm_mu_inc;
        continue;
      }
      solved_once = true;
      MlpPredictor candidate = net;
      candidate.set_params(net.params() + step);
      const ResidualJacobian next = batch_jacobian(candidate, batch);
      const double next_sse = next.residual.squaredNorm();
      if (std::isfinite(next_sse) && next_sse < sse) {
        net = std::move(candidate);
        rj = next;
        sse = next_sse;
        mu *= cfg.lm_mu_dec;
        accepted = true;
        result.trace.sse_per_epoch.push_back(sse);
      } else {
        mu *= cfg.lm_mu_inc;
      }
    }
    if (stalled && !solved_once)
      throw TrainingFailed("damped normal matrix singular up to mu_max", net);
  }
  result.net = std::move(net);
  result.trace.final_gp_db = frame_gain_db(frame, sse);
  return result;
}

TrainResult train_bp(const Frame& frame, const TrainConfig& cfg, const MlpPredictor& init) {
  cfg.validate();
  const Batch batch = make_batch(frame, init.n_inputs());
  MlpPredictor net = init;
  ResidualJacobian rj = batch_jacobian(net, batch);
  double sse = rj.residual.squaredNorm();

  TrainResult result;
  result.trace.initial_sse = sse;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const Eigen::VectorXd gradient = 2.0 * rj.jacobian.transpose() * rj.residual;
    MlpPredictor next = net;
    next.set_params(net.params() - cfg.bp_learning_rate * gradient);
    ResidualJacobian next_rj = batch_jacobian(next, batch);
    const double next_sse = next_rj.residual.squaredNorm();
    if (!std::isfinite(next_sse) || !next.all_finite())
      throw TrainingFailed("backpropagation diverged", net);
    net = std::move(next);
    rj = std::move(next_rj);
    sse = next_sse;
    result.trace.sse_per_epoch.push_back(sse);
  }
  result.net = std::move(net);
  result.trace.final_gp_db = frame_gain_db(frame, sse);
  return result;
}

TrainResult train(const Frame& frame, const TrainConfig& cfg, const MlpPredictor& init) {
  return cfg.algorithm == TrainAlgorithm::kLevenbergMarquardt ? train_lm(frame, cfg, init)
                                                              : train_bp(frame, cfg, init);
}

MultiInitResult train_multi_init(const Frame& frame, const TrainConfig& cfg) {
  cfg.validate();
  MultiInitResult out;
  double best_sse = std::numeric_limits<double>::infinity();
  bool have_best = false;
  for (int i = 0; i < cfg.n_inits; ++i) {
    const MlpPredictor init =
        random_init(cfg.n_hidden, cfg.n_inputs, init_seed(cfg.rng_seed, frame.index, i));
    try {
      TrainResult r = train(frame, cfg, init);
      r.trace.init_index = i;
      if (!have_best || r.trace.final_sse() < best_sse) {
        best_sse = r.trace.final_sse();
        out.best = r.net;
        out.best_index = i;
        have_best = true;
      }
      out.traces.push_back(std::move(r.trace));
    } catch (const TrainingFailed&) {
      ++out.failures;
    }
  }
  if (!have_best) throw Error(ErrorKind::kTrainingFailed, "every initialization failed");
  return out;
}

std::string to_record(const MlpPredictor& net) {
  std::string out = "mlp " + std::to_string(net.n_hidden()) + " " + std::to_string(net.n_inputs());
  const Eigen::VectorXd p = net.params();
  char buf[32];
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    std::snprintf(buf, sizeof buf, " %.17g", p[i]);
    out += buf;
  }
  return out;
}

MlpPredictor mlp_from_record(const std::string& record) {
  std::istringstream in(record);
  std::string tag;
  Eigen::Index hidden = 0, inputs = 0;
  if (!(in >> tag >> hidden >> inputs) || tag != "mlp" || hidden <= 0 || inputs <= 0)
    throw Error(ErrorKind::kFormat, "malformed mlp record header");
  MlpPredictor net = MlpPredictor::zeros(hidden, inputs);
  Eigen::VectorXd p(net.n_params());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    std::string token;
    if (!(in >> token)) throw Error(ErrorKind::kFormat, "mlp record too short");
    p[i] = std::stod(token);
  }
  net.set_params(p);
  return net;
}

}  // namespace nlpc

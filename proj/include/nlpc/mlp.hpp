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
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nlpc/error.hpp"
#include "nlpc/signal.hpp"

namespace nlpc {

/// f_NL(a) = 1 / (1 + e^-a).
template <typename Scalar>
Scalar sigmoid(Scalar a) {
  using std::exp;
  return Scalar(1) / (Scalar(1) + exp(-a));
}

/// N-input, H-hidden-sigmoid, single linear output predictor:
///
///   x̂[n] = Σ_j w2_j f_NL(Σ_i w1_ji x[n-i] + b1_j) + b2
///
/// Flat parameter order (used by the Jacobian and the text record) is
/// w1 row-major, then b1, w2, b2.
template <typename Scalar>
struct BasicMlpPredictor {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix w1;  // n_hidden x n_inputs
  Vector b1;
  Vector w2;
  Scalar b2 = Scalar(0);

  static BasicMlpPredictor zeros(Eigen::Index n_hidden, Eigen::Index n_inputs) {
    BasicMlpPredictor net;
    net.w1 = Matrix::Zero(n_hidden, n_inputs);
    net.b1 = Vector::Zero(n_hidden);
    net.w2 = Vector::Zero(n_hidden);
    return net;
  }

  Eigen::Index n_inputs() const { return w1.cols(); }
  Eigen::Index n_hidden() const { return w1.rows(); }
  Eigen::Index n_params() const { return n_hidden() * (n_inputs() + 2) + 1; }

  Vector params() const {
    Vector p(n_params());
    const Eigen::Index first = w1.size();
    p.head(first) = w1.template reshaped<Eigen::RowMajor>();
    p.segment(first, n_hidden()) = b1;
    p.segment(first + n_hidden(), n_hidden()) = w2;
    p[n_params() - 1] = b2;
    return p;
  }

  void set_params(const Eigen::Ref<const Vector>& p) {
    if (p.size() != n_params()) throw Error(ErrorKind::kSize, "parameter vector size mismatch");
    const Eigen::Index first = w1.size();
    w1 = p.head(first).template reshaped<Eigen::RowMajor>(n_hidden(), n_inputs());
    b1 = p.segment(first, n_hidden());
    w2 = p.segment(first + n_hidden(), n_hidden());
    b2 = p[n_params() - 1];
  }

  bool all_finite() const {
    return w1.allFinite() && b1.allFinite() && w2.allFinite() && std::isfinite(double(b2));
  }
};

using MlpPredictor = BasicMlpPredictor<double>;

/// Prediction from the N most recent samples, ordered x[n-1], x[n-2], ...
template <typename Scalar, typename Derived>
Scalar mlp_forward(const BasicMlpPredictor<Scalar>& net, const Eigen::MatrixBase<Derived>& taps) {
  if (taps.size() != net.n_inputs()) throw Error(ErrorKind::kSize, "tap count mismatch");
  Scalar out = net.b2;
  for (Eigen::Index j = 0; j < net.n_hidden(); ++j)
    out += net.w2[j] * sigmoid<Scalar>(net.w1.row(j).dot(taps.transpose()) + net.b1[j]);
  return out;
}

struct FramePrediction {
  Eigen::VectorXd predictions;
  Eigen::VectorXd residual;
};

/// Rows are tap vectors for every target at or after `start` in `window`.
Eigen::MatrixXd tap_matrix(const Eigen::Ref<const Eigen::VectorXd>& window, Eigen::Index start,
                           Eigen::Index n_inputs);

/// Open-loop prediction over window[start..] from true past samples.
FramePrediction mlp_predict_window(const MlpPredictor& net,
                                   const Eigen::Ref<const Eigen::VectorXd>& window,
                                   Eigen::Index start);

FramePrediction mlp_predict_frame(const MlpPredictor& net, const Frame& frame);

/// J[n][p] = ∂e[n]/∂θ_p with e = x - x̂, so J = -∂x̂/∂θ.
struct ResidualJacobian {
  Eigen::MatrixXd jacobian;
  Eigen::VectorXd residual;
};

ResidualJacobian mlp_jacobian(const MlpPredictor& net, const Frame& frame);

/// ∇ of Σ e² with respect to the flat parameters, i.e. 2 Jᵀe.
Eigen::VectorXd sse_gradient(const MlpPredictor& net, const Frame& frame);

enum class TrainAlgorithm { kLevenbergMarquardt, kBackprop };

struct TrainConfig {
  int epochs = 50;
  int n_inits = 5;
  Eigen::Index n_hidden = 2;
  Eigen::Index n_inputs = 10;
  TrainAlgorithm algorithm = TrainAlgorithm::kLevenbergMarquardt;
  double lm_mu0 = 1e-3;
  double lm_mu_inc = 10.0;
  double lm_mu_dec = 0.1;
  double lm_mu_max = 1e10;
  // Applied to the gradient of the summed squared error; 0.05 / frame_len
  // for the default 200-sample frame.
  double bp_learning_rate = 2.5e-4;
  std::uint64_t rng_seed = 0x4e4c5043u;

  void validate() const;
};

struct TrainTrace {
  double initial_sse = 0.0;
  std::vector<double> sse_per_epoch;
  double final_gp_db = 0.0;
  int init_index = 0;

  double final_sse() const { return sse_per_epoch.empty() ? initial_sse : sse_per_epoch.back(); }
};

struct TrainResult {
  MlpPredictor net;
  TrainTrace trace;
};

/// Raised when training cannot continue; still carries the best network seen.
class TrainingFailed : public Error {
 public:
  TrainingFailed(const std::string& what, MlpPredictor best)
      : Error(ErrorKind::kTrainingFailed, what), best_(std::move(best)) {}
  const MlpPredictor& best() const { return best_; }

 private:
  MlpPredictor best_;
};

/// Seed for one initialization, mixed through std::seed_seq.
std::uint64_t init_seed(std::uint64_t rng_seed, Eigen::Index frame_index, int init_index);

/// Parameters drawn uniformly from [-0.5, 0.5].
MlpPredictor random_init(Eigen::Index n_hidden, Eigen::Index n_inputs, std::uint64_t seed);

TrainResult train_lm(const Frame& frame, const TrainConfig& cfg, const MlpPredictor& init);
TrainResult train_bp(const Frame& frame, const TrainConfig& cfg, const MlpPredictor& init);

/// Dispatches on cfg.algorithm.
TrainResult train(const Frame& frame, const TrainConfig& cfg, const MlpPredictor& init);

struct MultiInitResult {
  MlpPredictor best;
  int best_index = 0;
  std::vector<TrainTrace> traces;  // one per successful initialization
  int failures = 0;
};

MultiInitResult train_multi_init(const Frame& frame, const TrainConfig& cfg);

/// "mlp <hidden> <inputs> p_0 ... p_{P-1}" with round-trip precision.
std::string to_record(const MlpPredictor& net);
MlpPredictor mlp_from_record(const std::string& record);

}  // namespace nlpc

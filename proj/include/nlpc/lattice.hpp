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
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "nlpc/error.hpp"
#include "nlpc/mlp.hpp"

namespace nlpc {

// A hidden branch Σ w_i x[n-i] is read as the predictor part of the monic
// error filter A(z) = 1 - Σ w_i z^-i, whose coefficients are α_i = -w_i.
// The all-zero lattice with reflection coefficients K_1..K_M realizes A(z),
// and the branch is recovered as x[n] - f_M[n].

/// Step-down recursion. Throws kConversionSingular when some |K_m| is within
/// `tolerance` of one.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> fir_to_lattice(
    const Eigen::MatrixBase<Derived>& taps, double tolerance = 1e-12) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index order = taps.size();
  if (order < 1) throw Error(ErrorKind::kSize, "fir_to_lattice needs at least one tap");
  Vector alpha = -taps;
  Vector k(order);
  Vector lower(order);
  for (Eigen::Index m = order; m >= 1; --m) {
    const Scalar km = alpha[m - 1];
    k[m - 1] = km;
    using std::abs;
    if (abs(abs(km) - Scalar(1)) <= Scalar(tolerance))
      throw Error(ErrorKind::kConversionSingular, "reflection coefficient of unit magnitude");
    const Scalar denom = Scalar(1) - km * km;
    for (Eigen::Index i = 1; i < m; ++i)
      lower[i - 1] = (alpha[i - 1] - km * alpha[m - i - 1]) / denom;
    alpha.head(m - 1) = lower.head(m - 1);
  }
  return k;
}

/// Step-up recursion; inverse of fir_to_lattice.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> lattice_to_fir(
    const Eigen::MatrixBase<Derived>& k) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index order = k.size();
  Vector alpha = Vector::Zero(order);
  Vector next(order);
  for (Eigen::Index m = 1; m <= order; ++m) {
    for (Eigen::Index i = 1; i < m; ++i)
      next[i - 1] = alpha[i - 1] + k[m - 1] * alpha[m - i - 1];
    next[m - 1] = k[m - 1];
    alpha.head(m) = next.head(m);
  }
  return -alpha;
}

/// Runs the order-M all-zero lattice over `window` (oldest first, the last
/// entry is the current sample x[n]) and returns the forward error f_M[n].
template <typename DerivedK, typename DerivedX>
typename DerivedX::Scalar lattice_forward_error(const Eigen::MatrixBase<DerivedK>& k,
                                                const Eigen::MatrixBase<DerivedX>& window) {
  using Scalar = typename DerivedX::Scalar;
  const Eigen::Index order = k.size();
  if (window.size() != order + 1) throw Error(ErrorKind::kSize, "lattice window size mismatch");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> f = window;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b = window;
  // After stage m only times t >= m are meaningful.
  for (Eigen::Index m = 1; m <= order; ++m) {
    const Scalar km = Scalar(k[m - 1]);
    for (Eigen::Index t = order; t >= m; --t) {
      const Scalar fm = f[t] + km * b[t - 1];
      const Scalar bm = km * f[t] + b[t - 1];
      f[t] = fm;
      b[t] = bm;
    }
  }
  return f[order];
}

struct LatticeBranch {
  Eigen::VectorXd k;
  double bias = 0.0;
  // Set when step-down hit a unit-magnitude coefficient; the branch then
  // stays in direct form and `k` is empty.
  std::optional<Eigen::VectorXd> fir_fallback;

  bool converted() const { return !fir_fallback.has_value(); }
};

/// Pre-activation of one branch: x[n] - f_M[n] + bias, equal to Σ w_i x[n-i] + bias.
/// `taps` are x[n-1], x[n-2], ... (most recent first).
double lattice_branch_output(const LatticeBranch& branch,
                             const Eigen::Ref<const Eigen::VectorXd>& taps, double current);

struct LatticeMlp {
  std::vector<LatticeBranch> branches;
  Eigen::VectorXd w2;
  double b2 = 0.0;
  Eigen::Index n_inputs = 0;

  Eigen::Index singular_branches() const;
};

/// Branch-wise conversion; singular branches fall back to direct form.
LatticeMlp to_lattice(const MlpPredictor& net);

/// Direct-form network computing the same function.
MlpPredictor fir_equivalent(const LatticeMlp& net);

double lattice_mlp_forward(const LatticeMlp& net, const Eigen::Ref<const Eigen::VectorXd>& taps,
                           double current);

/// Open-loop lattice prediction over window[start..].
Eigen::VectorXd lattice_predict_window(const LatticeMlp& net,
                                       const Eigen::Ref<const Eigen::VectorXd>& window,
                                       Eigen::Index start);

/// "lattice <hidden> <inputs>" followed by all K (branch-major), then b1, w2, b2.
std::string to_record(const LatticeMlp& net);

struct DispersionReport {
  std::vector<Eigen::Index> frame_index;  // convertible frames only
  std::vector<double> sigma_fir;
  std::vector<double> sigma_lattice;
  std::vector<double> log_ratio;
  double variance_fir = 0.0;  // pooled over all convertible frames
  double variance_lattice = 0.0;
  double variance_ratio = 0.0;
  // Per convertible frame: first weight of the first branch and its K_1.
  std::vector<double> w11;
  std::vector<double> w11_display;  // clipped to ±display_clip
  std::vector<double> k1;
  double w11_range = 0.0;
  double k1_range = 0.0;
  Eigen::Index singular_frames = 0;
  double display_clip = 10.0;
};

struct FrameNets {
  Eigen::Index frame_index = 0;
  MlpPredictor fir;
  LatticeMlp lattice;
};

DispersionReport dispersion_report(const std::vector<FrameNets>& frames,
                                   double display_clip = 10.0);

}  // namespace nlpc

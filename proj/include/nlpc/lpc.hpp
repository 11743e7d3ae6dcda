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
#include <limits>
#include <numbers>

#include <Eigen/Core>

#include "nlpc/error.hpp"
#include "nlpc/signal.hpp"

namespace nlpc {

/// Short-term linear predictor x̂[n] = Σ a_i x[n-i].
///
/// `k` holds the reflection coefficients produced by the Levinson-Durbin
/// recursion in the same sign convention as `a` (a first-order model on
/// r_m = ρ^m gives a_1 = k_1 = ρ). `err` is the final prediction-error energy.
template <typename Scalar>
struct BasicLpcModel {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector a;
  Vector k;
  Scalar err = Scalar(0);

  Eigen::Index order() const { return a.size(); }

  /// All |k_i| < 1, which makes 1 / (1 - Σ a_i z^-i) stable.
  bool is_stable() const { return (k.array().abs() < Scalar(1)).all(); }
};

using LpcModel = BasicLpcModel<double>;

struct GainResult {
  double gp_db = 0.0;
  double signal_energy = 0.0;
  double error_energy = 0.0;
  // Set when error_energy is zero; gp_db is then +infinity.
  bool infinite = false;
};

/// r[m] = Σ_n x[n] x[n-m] for m = 0..max_lag.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> autocorrelation(
    const Eigen::MatrixBase<Derived>& x, Eigen::Index max_lag) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.size();
  if (max_lag < 0 || n <= max_lag)
    throw Error(ErrorKind::kSize, "autocorrelation needs more samples than lags");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> r(max_lag + 1);
  for (Eigen::Index m = 0; m <= max_lag; ++m)
    r[m] = x.head(n - m).dot(x.tail(n - m));
  return r;
}

/// Symmetric Hamming taper, for the optional windowed analysis.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> hamming_windowed(
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = n > 1 ? 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * double(i) /
                                                     double(n - 1))
                           : 1.0;
    out[i] = x[i] * Scalar(w);
  }
  return out;
}

template <typename Derived>
BasicLpcModel<typename Derived::Scalar> levinson_durbin(const Eigen::MatrixBase<Derived>& r,
                                                        Eigen::Index order) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (order < 1 || r.size() < order + 1)
    throw Error(ErrorKind::kSize, "levinson_durbin needs order + 1 lags");
  if (!(r[0] > Scalar(0)))
    throw Error(ErrorKind::kDegenerateFrame, "zero-energy frame (r[0] <= 0)");

  BasicLpcModel<Scalar> model;
  model.a = Vector::Zero(order);
  model.k = Vector::Zero(order);
  Vector previous(order);
  Scalar err = r[0];
  for (Eigen::Index m = 1; m <= order; ++m) {
    Scalar acc = r[m];
    for (Eigen::Index i = 1; i < m; ++i) acc -= model.a[i - 1] * r[m - i];
    const Scalar k = acc / err;
    previous.head(m - 1) = model.a.head(m - 1);
    for (Eigen::Index i = 1; i < m; ++i)
      model.a[i - 1] = previous[i - 1] - k * previous[m - i - 1];
    model.a[m - 1] = k;
    model.k[m - 1] = k;
    err *= Scalar(1) - k * k;
    if (!(err > Scalar(0)))
      throw Error(ErrorKind::kNumericalSingularity,
                  "prediction-error energy vanished during recursion");
  }
  model.err = err;
  return model;
}

/// Autocorrelation-method analysis of one frame body (rectangular unless `hamming`).
inline LpcModel analyze_lpc(const Eigen::Ref<const Eigen::VectorXd>& body,
                            Eigen::Index order = 12, bool hamming = false) {
  if (hamming) return levinson_durbin(autocorrelation(hamming_windowed(body), order), order);
  return levinson_durbin(autocorrelation(body, order), order);
}

/// e[n] = x[n] - Σ a_i x[n-i] for every sample of `window` at or after `start`.
template <typename DerivedA, typename DerivedX>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1> fir_residual(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedX>& window,
    Eigen::Index start) {
  using Scalar = typename DerivedX::Scalar;
  const Eigen::Index order = a.size();
  if (start < order) throw Error(ErrorKind::kSize, "history shorter than predictor order");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> e(window.size() - start);
  for (Eigen::Index n = start; n < window.size(); ++n) {
    Scalar prediction(0);
    for (Eigen::Index i = 1; i <= order; ++i) prediction += a[i - 1] * window[n - i];
    e[n - start] = window[n] - prediction;
  }
  return e;
}

inline Eigen::VectorXd lpc_residual(const LpcModel& model, const Frame& frame) {
  if (frame.history.size() < model.order())
    throw Error(ErrorKind::kSize, "frame history shorter than LPC order");
  return fir_residual(model.a, frame.window(), frame.history.size());
}

/// All-pole reconstruction y[n] = excitation[n] + Σ a_i y[n-i], primed with `history`
/// (oldest first). Divergence is returned as-is.
template <typename DerivedA, typename DerivedE, typename DerivedH>
Eigen::Matrix<typename DerivedE::Scalar, Eigen::Dynamic, 1> all_pole_synthesize(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedE>& excitation,
    const Eigen::MatrixBase<DerivedH>& history) {
  using Scalar = typename DerivedE::Scalar;
  const Eigen::Index order = a.size();
  const Eigen::Index lead = history.size();
  if (lead < order) throw Error(ErrorKind::kSize, "history shorter than predictor order");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y(lead + excitation.size());
  y.head(lead) = history;
  for (Eigen::Index n = 0; n < excitation.size(); ++n) {
    Scalar acc = excitation[n];
    for (Eigen::Index i = 1; i <= order; ++i) acc += a[i - 1] * y[lead + n - i];
    y[lead + n] = acc;
  }
  return y.tail(excitation.size());
}

inline Eigen::VectorXd lpc_synthesize(const LpcModel& model,
                                      const Eigen::Ref<const Eigen::VectorXd>& excitation,
                                      const Eigen::Ref<const Eigen::VectorXd>& history) {
  return all_pole_synthesize(model.a, excitation, history);
}

/// Gp = 10 log10(Σ x² / Σ e²).
template <typename DerivedX, typename DerivedE>
GainResult prediction_gain(const Eigen::MatrixBase<DerivedX>& body,
                           const Eigen::MatrixBase<DerivedE>& residual) {
  if (body.size() != residual.size())
    throw Error(ErrorKind::kSize, "prediction_gain needs equal lengths");
  GainResult g;
  g.signal_energy = double(body.squaredNorm());
  g.error_energy = double(residual.squaredNorm());
  if (!(g.signal_energy > 0.0))
    throw Error(ErrorKind::kDegenerateFrame, "zero signal energy");
  if (g.error_energy == 0.0) {
    g.infinite = true;
    g.gp_db = std::numeric_limits<double>::infinity();
  } else {
    g.gp_db = 10.0 * std::log10(g.signal_energy / g.error_energy);
  }
  return g;
}

}  // namespace nlpc

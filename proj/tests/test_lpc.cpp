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

#include <doctest.h>

#include "nlpc/lpc.hpp"
#include "nlpc/quant.hpp"
#include "oracles.hpp"

using namespace nlpc;

TEST_SUITE("lpc") {

TEST_CASE("autocorrelation small cases") {
  CHECK(autocorrelation(Eigen::Vector4d(1, 0, 0, 0), 2) == Eigen::Vector3d(1, 0, 0));
  CHECK(autocorrelation(Eigen::Vector4d(1, 1, 1, 1), 1) == Eigen::Vector2d(4, 3));
  CHECK_THROWS_AS(autocorrelation(Eigen::Vector4d(1, 1, 1, 1), 4), Error);
}

TEST_CASE("autocorrelation matches double loop") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd x = oracle::random_vector(rng, 200, 1.0);
    const auto r = autocorrelation(x, 12);
    const auto ref = oracle::autocorrelation(std::vector<double>(x.begin(), x.end()), 12);
    for (int m = 0; m <= 12; ++m) CHECK(std::abs(r[m] - ref[std::size_t(m)]) <= 1e-12);
  }
}

TEST_CASE("autocorrelation works on float") {
  const Eigen::Vector3f x(1.0f, 2.0f, 3.0f);
  const Eigen::VectorXf r = autocorrelation(x, 1);
  CHECK(r[0] == doctest::Approx(14.0f));
  CHECK(r[1] == doctest::Approx(8.0f));
}

TEST_CASE("levinson_durbin closed forms") {
  Eigen::VectorXd white = Eigen::VectorXd::Zero(13);
  white[0] = 1.0;
  const LpcModel w = levinson_durbin(white, 12);
  CHECK(w.a.isZero(0.0));
  CHECK(w.err == 1.0);

  const LpcModel ar1 = levinson_durbin(Eigen::Vector2d(1.0, 0.9), 1);
  CHECK(ar1.a[0] == doctest::Approx(0.9));
  CHECK(ar1.k[0] == doctest::Approx(0.9));
  CHECK(ar1.err == doctest::Approx(0.19));
}

TEST_CASE("levinson_durbin agrees with a dense solve and the normal equations") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Frame f = oracle::ar2_frame(rng, 12, 200);
    const Eigen::VectorXd r = autocorrelation(f.body, 12);
    const LpcModel m = levinson_durbin(r, 12);
    CHECK((m.a - oracle::dense_normal_solve(r, 12)).cwiseAbs().maxCoeff() <= 1e-8);
    for (int i = 1; i <= 12; ++i) {
      double lhs = 0.0;
      for (int j = 1; j <= 12; ++j) lhs += m.a[j - 1] * r[std::abs(i - j)];
      CHECK(std::abs(lhs - r[i]) <= 1e-8 * r[0]);
    }
    CHECK(m.is_stable());
    double previous = r[0];
    for (int p = 1; p <= 12; ++p) {
      const double err = levinson_durbin(r, p).err;
      CHECK(err <= previous * (1 + 1e-12));
      previous = err;
    }
  }
}

TEST_CASE("levinson_durbin errors") {
  CHECK_THROWS_AS(levinson_durbin(Eigen::VectorXd::Zero(13), 12), Error);
  try {
    levinson_durbin(Eigen::VectorXd::Zero(13), 12);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDegenerateFrame);
  }
  // A constant sequence is perfectly predictable after one step.
  try {
    levinson_durbin(Eigen::Vector3d(1.0, 1.0, 1.0), 2);
    FAIL("expected singularity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNumericalSingularity);
  }
  CHECK_THROWS_AS(levinson_durbin(Eigen::Vector2d(1.0, 0.5), 2), Error);
}

TEST_CASE("residual cases and convolution oracle") {
  std::mt19937_64 rng(3);
  Frame f = oracle::ar2_frame(rng, 12, 200);
  LpcModel zero;
  zero.a = Eigen::VectorXd::Zero(12);
  zero.k = zero.a;
  CHECK(lpc_residual(zero, f) == f.body);

  // Exact AR(2) data with zero excitation.
  Frame exact;
  exact.history = Eigen::VectorXd::Zero(12);
  exact.history[10] = 0.3;
  exact.history[11] = -0.2;
  exact.body.resize(200);
  Eigen::VectorXd all(212);
  all.head(12) = exact.history;
  for (int n = 12; n < 212; ++n) all[n] = 1.6 * all[n - 1] - 0.8 * all[n - 2];
  exact.body = all.tail(200);
  LpcModel ar2;
  ar2.a = Eigen::VectorXd::Zero(12);
  ar2.a[0] = 1.6;
  ar2.a[1] = -0.8;
  ar2.k = ar2.a;
  CHECK(lpc_residual(ar2, exact).cwiseAbs().maxCoeff() <= 1e-12);

  for (int trial = 0; trial < 10; ++trial) {
    const LpcModel m = analyze_lpc(f.body);
    const Eigen::VectorXd w = f.window();
    const auto ref = oracle::convolve_residual(std::vector<double>(m.a.begin(), m.a.end()),
                                               std::vector<double>(w.begin(), w.end()), 12);
    const Eigen::VectorXd e = lpc_residual(m, f);
    for (Eigen::Index n = 0; n < e.size(); ++n) CHECK(std::abs(e[n] - ref[std::size_t(n)]) <= 1e-12);
    f = oracle::ar2_frame(rng, 12, 200);
  }
}

TEST_CASE("analysis then synthesis is the identity") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Frame f = oracle::ar2_frame(rng, 12, 200, 0.9 + 0.005 * trial, 0.1 * trial + 0.1);
    const LpcModel m = analyze_lpc(f.body, 12, trial % 2 == 1);
    const Eigen::VectorXd rec = lpc_synthesize(m, lpc_residual(m, f), f.history);
    CHECK((rec - f.body).cwiseAbs().maxCoeff() <= 1e-10);
  }
  LpcModel zero;
  zero.a = Eigen::VectorXd::Zero(12);
  const Eigen::VectorXd exc = Eigen::VectorXd::LinSpaced(20, -1, 1);
  CHECK(lpc_synthesize(zero, exc, Eigen::VectorXd::Ones(12)) == exc);
}

TEST_CASE("stable synthesis stays bounded and unstable synthesis diverges") {
  std::mt19937_64 rng(21);
  const Frame f = oracle::ar2_frame(rng, 12, 200);
  const LpcModel m = analyze_lpc(f.body);
  REQUIRE(m.is_stable());
  const Eigen::VectorXd noise = oracle::random_vector(rng, 2000, 1.0);
  const Eigen::VectorXd y = lpc_synthesize(m, noise, Eigen::VectorXd::Zero(12));
  CHECK(y.allFinite());
  CHECK(y.cwiseAbs().maxCoeff() < 1e6);

  // Pole at z = 1.05.
  LpcModel bad;
  bad.a = Eigen::VectorXd::Zero(12);
  bad.a[0] = 1.05;
  bad.k = bad.a;
  CHECK_FALSE(bad.is_stable());
  Eigen::VectorXd impulse = Eigen::VectorXd::Zero(200);
  impulse[0] = 1.0;
  const Eigen::VectorXd out = lpc_synthesize(bad, impulse, Eigen::VectorXd::Zero(12));
  CHECK(out.tail(100).squaredNorm() > out.head(100).squaredNorm());
  CHECK(detect_divergence(out, 1.0));
}

TEST_CASE("prediction_gain") {
  const Eigen::Vector3d body(1.0, -2.0, 0.5);
  CHECK(prediction_gain(body, body).gp_db == doctest::Approx(0.0));
  CHECK(prediction_gain(body, body / 10.0).gp_db == doctest::Approx(20.0));
  const GainResult inf = prediction_gain(body, Eigen::Vector3d::Zero());
  CHECK(inf.infinite);
  CHECK(std::isinf(inf.gp_db));
  CHECK_THROWS_AS(prediction_gain(Eigen::Vector3d::Zero(), body), Error);
  CHECK_THROWS_AS(prediction_gain(body, Eigen::Vector2d::Zero()), Error);
}

}

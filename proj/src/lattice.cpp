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

#include "nlpc/lattice.hpp"

#include <algorithm>
#include <cstdio>

namespace nlpc {
namespace {

double population_variance(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() == 0) return 0.0;
  return (v.array() - v.mean()).square().mean();
}

double branch_dot(const LatticeBranch& branch, const Eigen::Ref<const Eigen::VectorXd>& taps,
                  double current) {
  if (branch.fir_fallback) return branch.fir_fallback->dot(taps);
  const Eigen::Index order = branch.k.size();
  if (taps.size() != order) throw Error(ErrorKind::kSize, "tap count mismatch");
  Eigen::VectorXd window(order + 1);
  window[order] = current;
  for (Eigen::Index i = 0; i < order; ++i) window[order - 1 - i] = taps[i];
  return current - lattice_forward_error(branch.k, window);
}

}  // namespace

double lattice_branch_output(const LatticeBranch& branch,
                             const Eigen::Ref<const Eigen::VectorXd>& taps, double current) {
  return branch_dot(branch, taps, current) + branch.bias;
}

Eigen::Index LatticeMlp::singular_branches() const {
  return std::count_if(branches.begin(), branches.end(),
                       [](const LatticeBranch& b) { return !b.converted(); });
}

LatticeMlp to_lattice(const MlpPredictor& net) {
  LatticeMlp out;
  out.n_inputs = net.n_inputs();
  out.w2 = net.w2;
  out.b2 = net.b2;
  for (Eigen::Index j = 0; j < net.n_hidden(); ++j) {
    LatticeBranch branch;
    branch.bias = net.b1[j];
    const Eigen::VectorXd taps = net.w1.row(j).transpose();
    try {
      branch.k = fir_to_lattice(taps);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kConversionSingular) throw;
      branch.fir_fallback = taps;
    }
    out.branches.push_back(std::move(branch));
  }
  return out;
}

MlpPredictor fir_equivalent(const LatticeMlp& net) {
  const auto hidden = Eigen::Index(net.branches.size());
  MlpPredictor out = MlpPredictor::zeros(hidden, net.n_inputs);
  for (Eigen::Index j = 0; j < hidden; ++j) {
    const LatticeBranch& branch = net.branches[std::size_t(j)];
    out.w1.row(j) = branch.fir_fallback ? *branch.fir_fallback : lattice_to_fir(branch.k);
    out.b1[j] = branch.bias;
  }
  out.w2 = net.w2;
  out.b2 = net.b2;
  return out;
}

double lattice_mlp_forward(const LatticeMlp& net, const Eigen::Ref<const Eigen::VectorXd>& taps,
                           double current) {
  double out = net.b2;
  for (std::size_t j = 0; j < net.branches.size(); ++j)
    out += net.w2[Eigen::Index(j)] * sigmoid(lattice_branch_output(net.branches[j], taps, current));
  return out;
}

Eigen::VectorXd lattice_predict_window(const LatticeMlp& net,
                                       const Eigen::Ref<const Eigen::VectorXd>& window,
                                       Eigen::Index start) {
  const Eigen::MatrixXd taps = tap_matrix(window, start, net.n_inputs);
  Eigen::VectorXd out(taps.rows());
  for (Eigen::Index n = 0; n < taps.rows(); ++n)
    out[n] = lattice_mlp_forward(net, taps.row(n).transpose(), window[start + n]);
  return out;
}

std::string to_record(const LatticeMlp& net) {
  std::string out = "lattice " + std::to_string(net.branches.size()) + " " +
                    std::to_string(net.n_inputs);
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, " %.17g", v);
    out += buf;
  };
  for (const LatticeBranch& b : net.branches) {
    // Direct-form fallback branches are prefixed with "fir".
    const Eigen::VectorXd& coeffs = b.fir_fallback ? *b.fir_fallback : b.k;
    if (b.fir_fallback) out += " fir";
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) put(coeffs[i]);
  }
  for (const LatticeBranch& b : net.branches) put(b.bias);
  for (Eigen::Index j = 0; j < net.w2.size(); ++j) put(net.w2[j]);
  put(net.b2);
  return out;
}

DispersionReport dispersion_report(const std::vector<FrameNets>& frames, double display_clip) {
  if (frames.empty()) throw Error(ErrorKind::kEmptyInput, "dispersion_report needs frames");
  DispersionReport report;
  report.display_clip = display_clip;
  std::vector<double> pooled_fir;
  std::vector<double> pooled_lattice;
  for (const FrameNets& f : frames) {
    if (f.lattice.singular_branches() > 0) {
      ++report.singular_frames;
      continue;
    }
    const Eigen::VectorXd fir = f.fir.w1.reshaped<Eigen::RowMajor>();
    Eigen::VectorXd lattice(fir.size());
    Eigen::Index at = 0;
    for (const LatticeBranch& b : f.lattice.branches) {
      lattice.segment(at, b.k.size()) = b.k;
      at += b.k.size();
    }
    const double s_fir = std::sqrt(population_variance(fir));
    const double s_lat = std::sqrt(population_variance(lattice));
    report.frame_index.push_back(f.frame_index);
    report.sigma_fir.push_back(s_fir);
    report.sigma_lattice.push_back(s_lat);
    report.log_ratio.push_back(std::log10(s_fir / s_lat));
    pooled_fir.insert(pooled_fir.end(), fir.begin(), fir.end());
    pooled_lattice.insert(pooled_lattice.end(), lattice.begin(), lattice.end());

    const double w = f.fir.w1(0, 0);
    report.w11.push_back(w);
    report.w11_display.push_back(std::clamp(w, -display_clip, display_clip));
    report.k1.push_back(f.lattice.branches.front().k[0]);
  }
  if (!report.w11.empty()) {
    const auto [wmin, wmax] = std::minmax_element(report.w11.begin(), report.w11.end());
    const auto [kmin, kmax] = std::minmax_element(report.k1.begin(), report.k1.end());
    report.w11_range = *wmax - *wmin;
    report.k1_range = *kmax - *kmin;
    report.variance_fir = population_variance(
        Eigen::Map<const Eigen::VectorXd>(pooled_fir.data(), Eigen::Index(pooled_fir.size())));
    report.variance_lattice = population_variance(Eigen::Map<const Eigen::VectorXd>(
        pooled_lattice.data(), Eigen::Index(pooled_lattice.size())));
    report.variance_ratio = report.variance_fir / report.variance_lattice;
  }
  return report;
}

}  // namespace nlpc

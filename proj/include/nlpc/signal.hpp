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

#include <filesystem>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace nlpc {

/// Mono speech scaled into [-1, 1].
struct AudioSignal {
  Eigen::VectorXd samples;
  int sample_rate_hz = 8000;
};

enum class FrameLabel { kVoiced, kUnvoiced, kSilence };

std::string_view to_string(FrameLabel label);

struct FrameConfig {
  Eigen::Index frame_len = 200;
  // Must cover both the LPC order and the MLP input count.
  Eigen::Index history_len = 12;
  int sample_rate_hz = 8000;

  double silence_rms = 0.01;
  double voiced_rms = 0.02;
  // Crossings per second, as a fraction of the sample rate.
  double voiced_zcr_fraction = 0.14;

  /// Throws Error(kArgument) when frame_len < 2 * history_len or history_len < 12.
  void validate() const;
};

/// A window of speech together with the samples that precede it.
struct Frame {
  Eigen::Index index = 0;
  Eigen::VectorXd history;  // oldest first, history_len samples
  Eigen::VectorXd body;
  FrameLabel label = FrameLabel::kSilence;

  /// history followed by body, so that window()[history.size() + n] == body[n].
  Eigen::VectorXd window() const;
};

/// Reads a 16-bit mono PCM WAV file; samples are divided by 32768.
AudioSignal load_audio(const std::filesystem::path& path);

/// Writes 16-bit mono PCM, rounding and saturating each sample.
void save_audio(const std::filesystem::path& path, const AudioSignal& signal);

/// Scales the whole signal by one factor so that its peak magnitude is `peak`.
AudioSignal normalize_peak(const AudioSignal& signal, double peak = 1.0);

FrameLabel classify_frame(const Eigen::Ref<const Eigen::VectorXd>& body,
                          const FrameConfig& cfg = {});

/// Zero crossings per sample.
double zero_crossing_rate(const Eigen::Ref<const Eigen::VectorXd>& body);

double rms(const Eigen::Ref<const Eigen::VectorXd>& body);

/// Non-overlapping frames; the trailing partial frame is dropped.
std::vector<Frame> frame_signal(const AudioSignal& signal, const FrameConfig& cfg);

}  // namespace nlpc

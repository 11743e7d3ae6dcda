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

#include "nlpc/signal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "nlpc/error.hpp"

namespace nlpc {
namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
         (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return std::uint16_t(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char((v >> 8) & 0xff));
}

}  // namespace

std::string_view to_string(FrameLabel label) {
  switch (label) {
    case FrameLabel::kVoiced: return "voiced";
    case FrameLabel::kUnvoiced: return "unvoiced";
    case FrameLabel::kSilence: return "silence";
  }
  return "unknown";
}

void FrameConfig::validate() const {
  if (history_len < 12)
    throw Error(ErrorKind::kArgument, "history_len must be at least 12");
  if (frame_len < 2 * history_len)
    throw Error(ErrorKind::kArgument, "frame_len must be at least 2 * history_len");
  if (sample_rate_hz <= 0)
    throw Error(ErrorKind::kArgument, "sample rate must be positive");
}

Eigen::VectorXd Frame::window() const {
  Eigen::VectorXd w(history.size() + body.size());
  w << history, body;
  return w;
}

AudioSignal load_audio(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                         std::istreambuf_iterator<char>()};
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw Error(ErrorKind::kFormat, path.string() + ": not a RIFF/WAVE file");

  bool have_fmt = false;
  int sample_rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size())
      throw Error(ErrorKind::kFormat, path.string() + ": truncated chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw Error(ErrorKind::kFormat, path.string() + ": short fmt chunk");
      const std::uint16_t format = read_u16(bytes.data() + body);
      const std::uint16_t channels = read_u16(bytes.data() + body + 2);
      sample_rate = int(read_u32(bytes.data() + body + 4));
      const std::uint16_t bits = read_u16(bytes.data() + body + 14);
      if (format != 1 || channels != 1 || bits != 16)
        throw Error(ErrorKind::kFormat,
                    path.string() + ": only 16-bit mono PCM is supported");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw Error(ErrorKind::kFormat, path.string() + ": data before fmt");
      AudioSignal signal;
      signal.sample_rate_hz = sample_rate;
      signal.samples.resize(Eigen::Index(size / 2));
      for (Eigen::Index i = 0; i < signal.samples.size(); ++i) {
        const auto raw = std::int16_t(read_u16(bytes.data() + body + 2 * std::size_t(i)));
        signal.samples[i] = double(raw) / 32768.0;
      }
      if (sample_rate <= 0) throw Error(ErrorKind::kFormat, "invalid sample rate");
      return signal;
    }
    pos = body + size + (size & 1u);
  }
  throw Error(ErrorKind::kFormat, path.string() + ": no data chunk");
}

void save_audio(const std::filesystem::path& path, const AudioSignal& signal) {
  const auto n = std::uint32_t(signal.samples.size());
  std::string out;
  out.reserve(44 + 2 * std::size_t(n));
  out += "RIFF";
  put_u32(out, 36 + 2 * n);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, 1);
  put_u32(out, std::uint32_t(signal.sample_rate_hz));
  put_u32(out, std::uint32_t(signal.sample_rate_hz) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, 2 * n);
  for (Eigen::Index i = 0; i < signal.samples.size(); ++i) {
    const double scaled = std::round(signal.samples[i] * 32768.0);
    put_u16(out, std::uint16_t(std::int16_t(std::clamp(scaled, -32768.0, 32767.0))));
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  file.write(out.data(), std::streamsize(out.size()));
}

AudioSignal normalize_peak(const AudioSignal& signal, double peak) {
  AudioSignal out = signal;
  const double max_abs = signal.samples.size() ? signal.samples.cwiseAbs().maxCoeff() : 0.0;
  if (max_abs > 0.0) out.samples *= peak / max_abs;
  return out;
}

double rms(const Eigen::Ref<const Eigen::VectorXd>& body) {
  if (body.size() == 0) return 0.0;
  return std::sqrt(body.squaredNorm() / double(body.size()));
}

double zero_crossing_rate(const Eigen::Ref<const Eigen::VectorXd>& body) {
  if (body.size() < 2) return 0.0;
  Eigen::Index crossings = 0;
  for (Eigen::Index n = 1; n < body.size(); ++n)
    if ((body[n] >= 0.0) != (body[n - 1] >= 0.0)) ++crossings;
  return double(crossings) / double(body.size() - 1);
}

FrameLabel classify_frame(const Eigen::Ref<const Eigen::VectorXd>& body,
                          const FrameConfig& cfg) {
  const double level = rms(body);
  if (level < cfg.silence_rms) return FrameLabel::kSilence;
  if (zero_crossing_rate(body) < cfg.voiced_zcr_fraction && level >= cfg.voiced_rms)
    return FrameLabel::kVoiced;
  return FrameLabel::kUnvoiced;
}

std::vector<Frame> frame_signal(const AudioSignal& signal, const FrameConfig& cfg) {
  cfg.validate();
  const Eigen::Index total = signal.samples.size();
  if (total < cfg.frame_len)
    throw Error(ErrorKind::kEmptyInput, "signal shorter than one frame");

  const Eigen::Index count = total / cfg.frame_len;
  std::vector<Frame> frames;
  frames.reserve(std::size_t(count));
  for (Eigen::Index k = 0; k < count; ++k) {
    Frame frame;
    frame.index = k;
    const Eigen::Index start = k * cfg.frame_len;
    frame.body = signal.samples.segment(start, cfg.frame_len);
    frame.history = Eigen::VectorXd::Zero(cfg.history_len);
    const Eigen::Index available = std::min(start, cfg.history_len);
    frame.history.tail(available) = signal.samples.segment(start - available, available);
    frame.label = classify_frame(frame.body, cfg);
    frames.push_back(std::move(frame));
  }
  return frames;
}

}  // namespace nlpc

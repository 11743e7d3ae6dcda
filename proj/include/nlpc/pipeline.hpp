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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nlpc/lattice.hpp"
#include "nlpc/lpc.hpp"
#include "nlpc/mlp.hpp"
#include "nlpc/quant.hpp"
#include "nlpc/report.hpp"
#include "nlpc/signal.hpp"

namespace nlpc {

inline constexpr const char* kToolVersion = "1.0.0";

/// One corpus file; parsed from "path[:speaker[:sex]]".
struct InputSpec {
  std::filesystem::path path;
  std::string speaker;
  std::string sex;

  static InputSpec parse(const std::string& text);
};

struct RunConfig {
  std::string command;
  std::vector<InputSpec> inputs;
  FrameConfig frame;
  TrainConfig train;
  Eigen::Index lpc_order = 12;
  bool hamming = false;
  std::vector<int> bits_list = {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
  SweepMode sweep_mode = SweepMode::kAnalysis;
  bool quantize_all_layers = false;
  int residual_bits = 9;
  // Unset means the designated frame: the most energetic voiced one.
  std::optional<Eigen::Index> frame_index;
  Eigen::Index segment_frames = 1;
  std::filesystem::path out_dir = "out";
  bool emit_svg = false;

  void validate() const;
};

void to_json(nlohmann::json& j, const RunConfig& cfg);
void from_json(const nlohmann::json& j, RunConfig& cfg);

struct CorpusFrame {
  Frame frame;
  std::size_t input = 0;
};

struct Corpus {
  std::vector<AudioSignal> signals;
  std::vector<CorpusFrame> frames;  // frame.index runs across all inputs
};

/// Loads every input, scales each file to unit peak, and frames it.
Corpus load_corpus(const RunConfig& cfg);

struct FrameAnalysis {
  std::size_t corpus_index = 0;
  LpcModel lpc;
  MultiInitResult mlp;
  Eigen::VectorXd residual_lpc;
  Eigen::VectorXd residual_nlpc;
  double gp_lpc = 0.0;
  double gp_nlpc = 0.0;
};

/// LPC analysis plus best-of-n multi-initialization training on one frame.
FrameAnalysis analyze_frame(const Frame& frame, const RunConfig& cfg);

/// The most energetic voiced frame, else the most energetic frame.
std::size_t designated_frame(const Corpus& corpus);

/// The frame named by cfg.frame_index (bounds-checked), or the designated one.
std::size_t selected_frame(const Corpus& corpus, const RunConfig& cfg);

struct CommandOutput {
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  nlohmann::json parameters = nlohmann::json::array();     // per-frame predictors
  std::vector<std::string> log;
};

/// Runs cfg.command and returns the CSV (and optional SVG) contents in a fixed order.
CommandOutput run_command(const RunConfig& cfg);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string content_hash(const std::string& bytes);

/// Writes every file plus manifest.json into cfg.out_dir.
nlohmann::json write_run(const RunConfig& cfg, const CommandOutput& output, double seconds);

struct ReplayResult {
  std::vector<std::string> matched;
  std::vector<std::string> mismatched;
  bool ok() const { return mismatched.empty(); }
};

/// Re-runs the manifest's configuration into `out_dir` and compares output hashes.
ReplayResult replay_manifest(const std::filesystem::path& manifest,
                             const std::filesystem::path& out_dir);

}  // namespace nlpc

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

// Command-line driver: one subcommand per experiment, CSV outputs plus a
// manifest.json that `nlpc replay` can re-run byte-for-byte.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlpc/pipeline.hpp"

namespace {

std::vector<int> parse_bits_list(const std::string& text) {
  // "4,6,8" or "4..16" (inclusive)
  std::vector<int> bits;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const int lo = std::stoi(text.substr(0, dots));
    const int hi = std::stoi(text.substr(dots + 2));
    for (int b = lo; b <= hi; ++b) bits.push_back(b);
    return bits;
  }
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) bits.push_back(std::stoi(item));
  return bits;
}

struct CommonOptions {
  std::vector<std::string> inputs;
  std::string out_dir = "out";
  std::uint64_t seed = nlpc::TrainConfig{}.rng_seed;
  long frame_len = 200;
  long hidden = 2;
  int epochs = 50;
  int inits = 5;
  long order = 12;
  std::string bits_list;
  bool emit_svg = false;
  bool hamming = false;
  long frame = -1;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--input", o.inputs, "WAV file, optionally path:speaker:sex")->required();
  app->add_option("--out-dir", o.out_dir, "Output directory");
  app->add_option("--seed", o.seed, "Seed for every random draw");
  app->add_option("--frame-len", o.frame_len, "Frame length in samples");
  app->add_option("--hidden", o.hidden, "Hidden neurons")->check(CLI::IsMember({2, 4}));
  app->add_option("--epochs", o.epochs, "Training epochs per initialization");
  app->add_option("--inits", o.inits, "Initializations per frame");
  app->add_option("--order", o.order, "LPC order");
  app->add_option("--bits-list", o.bits_list, "Bit depths, e.g. 2..16 or 4,8,12");
  app->add_flag("--emit-svg", o.emit_svg, "Also write SVG charts");
  app->add_flag("--hamming", o.hamming, "Hamming-window the LPC analysis");
  app->add_option("--frame", o.frame, "Frame index (default: most energetic voiced frame)");
}

nlpc::RunConfig to_config(const std::string& command, const CommonOptions& o) {
  nlpc::RunConfig cfg;
  cfg.command = command;
  for (const auto& in : o.inputs) cfg.inputs.push_back(nlpc::InputSpec::parse(in));
  cfg.out_dir = o.out_dir;
  cfg.train.rng_seed = o.seed;
  cfg.frame.frame_len = o.frame_len;
  cfg.train.n_hidden = o.hidden;
  cfg.train.epochs = o.epochs;
  cfg.train.n_inits = o.inits;
  cfg.lpc_order = o.order;
  cfg.hamming = o.hamming;
  cfg.emit_svg = o.emit_svg;
  if (!o.bits_list.empty()) cfg.bits_list = parse_bits_list(o.bits_list);
  if (o.frame >= 0) cfg.frame_index = o.frame;
  return cfg;
}

int fail(std::string_view category, const std::string& message) {
  std::cerr << "error: " << category << ": " << message << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear vs nonlinear (MLP) short-term speech prediction experiments"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gains", "Per-frame LPC-12 and NLPC prediction gains and the grouped gain table"},
      {"train-curve", "SSE per epoch for Levenberg-Marquardt and backprop on one frame"},
      {"init-sensitivity", "Gain per initialization for 2 and 4 hidden neurons"},
      {"scatter", "G_lpc vs G_nlpc scatter with least-squares fit"},
      {"residual-hist", "Residual histograms and sign asymmetry"},
      {"quant-sweep", "Prediction gain versus parameter quantization bits"},
      {"residual-quant", "Closed-loop reconstruction error with a quantized residual"},
      {"lattice-report", "FIR vs lattice coefficient dispersion and trajectories"},
  };
  std::vector<CommonOptions> options(commands.size());
  std::vector<CLI::App*> subs;
  std::string mode = "analysis";
  int residual_bits = 9;
  long segment_frames = 1;
  bool all_layers = false;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i].first, commands[i].second);
    add_common(sub, options[i]);
    if (commands[i].first == "quant-sweep") {
      sub->add_option("--mode", mode, "analysis | synthesis")
          ->check(CLI::IsMember({"analysis", "synthesis"}));
      sub->add_flag("--all-layers", all_layers, "Quantize every layer, not only the first");
    }
    if (commands[i].first == "residual-quant") {
      sub->add_option("--bits", residual_bits, "Residual quantizer bits");
      sub->add_option("--segment-frames", segment_frames, "Frames in the reconstructed segment");
    }
    subs.push_back(sub);
  }
  std::string manifest_path;
  std::string replay_out = "replay";
  CLI::App* replay = app.add_subcommand("replay", "Re-run a manifest and compare outputs");
  replay->add_option("--manifest", manifest_path, "manifest.json to replay")->required();
  replay->add_option("--out-dir", replay_out, "Where to write the replayed outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("argument", e.what());
  }

  try {
    if (replay->parsed()) {
      const nlpc::ReplayResult r = nlpc::replay_manifest(manifest_path, replay_out);
      for (const auto& name : r.matched) std::cout << "match    " << name << '\n';
      for (const auto& name : r.mismatched) std::cout << "MISMATCH " << name << '\n';
      return r.ok() ? 0 : fail("replay", "outputs differ from the manifest");
    }
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      nlpc::RunConfig cfg = to_config(commands[i].first, options[i]);
      cfg.sweep_mode = mode == "synthesis" ? nlpc::SweepMode::kAnalysisSynthesis
                                           : nlpc::SweepMode::kAnalysis;
      cfg.quantize_all_layers = all_layers;
      cfg.residual_bits = residual_bits;
      cfg.segment_frames = segment_frames;
      const auto start = std::chrono::steady_clock::now();
      const nlpc::CommandOutput out = nlpc::run_command(cfg);
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      nlpc::write_run(cfg, out, seconds);
      for (const auto& line : out.log) std::cerr << "warning: " << line << '\n';
      for (const auto& [name, contents] : out.files)
        std::cout << (cfg.out_dir / name).string() << '\n';
    }
  } catch (const nlpc::Error& e) {
    return fail(nlpc::to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}

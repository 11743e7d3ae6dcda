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

#include "nlpc/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>

#include "nlpc/svg.hpp"

namespace nlpc {
namespace {

using nlohmann::json;

std::string algorithm_name(TrainAlgorithm a) {
  return a == TrainAlgorithm::kLevenbergMarquardt ? "levenberg_marquardt" : "backprop";
}

std::string mode_name(SweepMode m) {
  return m == SweepMode::kAnalysis ? "analysis" : "synthesis";
}

std::string num(double v) { return format_number(v); }
std::string num(Eigen::Index v) { return format_number(static_cast<long long>(v)); }

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

bool is_voiced(const CorpusFrame& f) { return f.frame.label == FrameLabel::kVoiced; }
bool is_speech(const CorpusFrame& f) { return f.frame.label != FrameLabel::kSilence; }

json frame_parameters(const Corpus& corpus, const FrameAnalysis& a) {
  return {{"frame", corpus.frames[a.corpus_index].frame.index},
          {"lpc_a", vector_json(a.lpc.a)},
          {"mlp", to_record(a.mlp.best)},
          {"lattice", to_record(to_lattice(a.mlp.best))}};
}

// Analyzes every frame accepted by `keep`; failures are logged and skipped.
template <typename Pred>
std::vector<FrameAnalysis> analyze_frames(const Corpus& corpus, const RunConfig& cfg,
                                          CommandOutput& out, Pred keep) {
  std::vector<FrameAnalysis> results;
  for (std::size_t i = 0; i < corpus.frames.size(); ++i) {
    const CorpusFrame& cf = corpus.frames[i];
    if (!keep(cf)) continue;
    try {
      FrameAnalysis a = analyze_frame(cf.frame, cfg);
      a.corpus_index = i;
      out.parameters.push_back(frame_parameters(corpus, a));
      results.push_back(std::move(a));
    } catch (const Error& e) {
      out.log.push_back("frame " + std::to_string(cf.frame.index) + ": " +
                        std::string(to_string(e.kind())) + ": " + e.what());
    }
  }
  return results;
}

std::vector<FrameGain> frame_gains(const Corpus& corpus, const RunConfig& cfg,
                                   const std::vector<FrameAnalysis>& analyses) {
  std::vector<FrameGain> gains;
  for (const FrameAnalysis& a : analyses) {
    const CorpusFrame& cf = corpus.frames[a.corpus_index];
    const InputSpec& in = cfg.inputs[cf.input];
    gains.push_back({cf.frame.index, cf.frame.label, in.speaker, in.sex, a.gp_lpc, a.gp_nlpc});
  }
  return gains;
}

void add_file(CommandOutput& out, std::string name, std::string contents) {
  out.files.emplace_back(std::move(name), std::move(contents));
}

std::vector<double> iota_axis(std::size_t n, double first = 1.0) {
  std::vector<double> x(n);
  std::iota(x.begin(), x.end(), first);
  return x;
}

CommandOutput cmd_gains(const RunConfig& cfg, const Corpus& corpus) {
  CommandOutput out;
  const auto analyses = analyze_frames(corpus, cfg, out, [](const CorpusFrame&) { return true; });
  const auto gains = frame_gains(corpus, cfg, analyses);
  add_file(out, "gains_frames.csv", to_csv(gains).str());

  CsvTable table{{"grouping", "group", "count", "mean_lpc_db", "std_lpc_db", "mean_nlpc_db",
                  "std_nlpc_db"},
                 {}};
  const std::pair<const char*, GroupBy> groupings[] = {
      {"all", GroupBy::kAll}, {"label", GroupBy::kLabel}, {"speaker", GroupBy::kSpeaker},
      {"sex", GroupBy::kSex}};
  for (const auto& [name, by] : groupings) {
    if (gains.empty()) break;
    const GainTable t = gain_table(gains, by);
    for (const GainGroup& g : t.groups)
      table.add_row({name, g.name, num(g.count), num(g.mean_lpc), num(g.std_lpc),
                     num(g.mean_nlpc), num(g.std_nlpc)});
  }
  add_file(out, "gains_table.csv", table.str());

  if (cfg.emit_svg) {
    std::vector<double> x, lpc, nlpc;
    for (const FrameGain& g : gains) {
      x.push_back(double(g.frame_index));
      lpc.push_back(g.gp_lpc);
      nlpc.push_back(g.gp_nlpc);
    }
    add_file(out, "gains_frames.svg",
             svg_chart("Prediction gain per frame [dB]", {{"LPC", x, lpc}, {"NLPC", x, nlpc}}));
  }
  return out;
}

CommandOutput cmd_train_curve(const RunConfig& cfg, const Corpus& corpus) {
  CommandOutput out;
  const Frame& frame = corpus.frames[selected_frame(corpus, cfg)].frame;
  const MlpPredictor init = random_init(cfg.train.n_hidden, cfg.train.n_inputs,
                                        init_seed(cfg.train.rng_seed, frame.index, 0));
  TrainConfig lm_cfg = cfg.train;
  lm_cfg.algorithm = TrainAlgorithm::kLevenbergMarquardt;
  TrainConfig bp_cfg = cfg.train;
  bp_cfg.algorithm = TrainAlgorithm::kBackprop;
  const TrainResult lm = train_lm(frame, lm_cfg, init);
  TrainTrace bp_trace;
  try {
    bp_trace = train_bp(frame, bp_cfg, init).trace;
  } catch (const TrainingFailed& e) {
    out.log.push_back("frame " + std::to_string(frame.index) + ": backprop: " + e.what());
    throw;
  }
  const TrainingCurves curves = training_curves(lm.trace, bp_trace);
  add_file(out, "train_curve.csv", to_csv(curves).str());
  out.parameters.push_back({{"frame", frame.index}, {"mlp_init", to_record(init)},
                            {"mlp_lm", to_record(lm.net)}});
  if (cfg.emit_svg) {
    const auto x = iota_axis(curves.lm.size());
    add_file(out, "train_curve.svg",
             svg_chart("SSE vs epochs", {{"backprop", x, curves.bp}, {"Levenberg-Marquardt", x, curves.lm}}));
  }
  return out;
}

CommandOutput cmd_init_sensitivity(const RunConfig& cfg, const Corpus& corpus) {
  CommandOutput out;
  std::vector<std::size_t> frames;
  if (cfg.frame_index) {
    frames.push_back(selected_frame(corpus, cfg));
  } else {
    for (std::size_t i = 0; i < corpus.frames.size(); ++i)
      if (is_voiced(corpus.frames[i])) frames.push_back(i);
  }
  std::vector<InitSensitivityRow> rows;
  for (std::size_t i : frames) {
    const Frame& frame = corpus.frames[i].frame;
    InitSensitivityRow row;
    row.frame_index = frame.index;
    try {
      const LpcModel lpc = analyze_lpc(frame.body, cfg.lpc_order, cfg.hamming);
      row.gp_lpc = prediction_gain(frame.body, lpc_residual(lpc, frame)).gp_db;
      for (Eigen::Index hidden : {Eigen::Index(2), Eigen::Index(4)}) {
        TrainConfig tc = cfg.train;
        tc.n_hidden = hidden;
        auto& column = hidden == 2 ? row.gp_h2 : row.gp_h4;
        for (int k = 0; k < tc.n_inits; ++k) {
          const MlpPredictor init =
              random_init(hidden, tc.n_inputs, init_seed(tc.rng_seed, frame.index, k));
          try {
            column.push_back(train(frame, tc, init).trace.final_gp_db);
          } catch (const TrainingFailed&) {
            column.push_back(std::nan(""));
          }
        }
      }
      rows.push_back(std::move(row));
    } catch (const Error& e) {
      out.log.push_back("frame " + std::to_string(frame.index) + ": " +
                        std::string(to_string(e.kind())) + ": " + e.what());
    }
  }
  const InitSensitivityTable table = init_sensitivity_table(std::move(rows));
  add_file(out, "init_sensitivity.csv", to_csv(table).str());
  if (cfg.emit_svg && !table.rows.empty()) {
    const auto& r = table.rows.front();
    const auto x = iota_axis(r.gp_h2.size(), 0.0);
    add_file(out, "init_sensitivity.svg",
             svg_chart("Gp per initialization, frame " + std::to_string(r.frame_index),
                       {{"MLP 4x1", x, r.gp_h4},
                        {"MLP 2x1", x, r.gp_h2},
                        {"LPC-12", x, std::vector<double>(x.size(), r.gp_lpc), true}}));
  }
  return out;
}

CommandOutput cmd_scatter(const RunConfig& cfg, const Corpus& corpus) {
  CommandOutput out;
  const auto analyses = analyze_frames(corpus, cfg, out, is_speech);
  const auto gains = frame_gains(corpus, cfg, analyses);
  std::vector<double> x, y;
  for (const FrameGain& g : gains) {
    x.push_back(g.gp_lpc);
    y.push_back(g.gp_nlpc);
  }
  const GainScatter scatter = gain_scatter(x, y);
  add_file(out, "scatter_points.csv", scatter_points_csv(scatter, gains).str());
  add_file(out, "scatter_fit.csv", scatter_fit_csv(scatter).str());
  if (cfg.emit_svg)
    add_file(out, "scatter.svg", svg_chart("G_lpc vs G_nlpc [dB]", {{"frames", x, y, true}}, true));
  return out;
}

CsvTable histogram_csv(const std::vector<std::pair<std::string, ResidualHistogram>>& hists) {
  CsvTable csv{{"predictor", "bin_lo", "bin_hi", "count"}, {}};
  for (const auto& [name, h] : hists)
    for (std::size_t b = 0; b < h.counts.size(); ++b)
      csv.add_row({name, num(h.edges[b]), num(h.edges[b + 1]), num(h.counts[b])});
  return csv;
}

CommandOutput cmd_residual_hist(const RunConfig& cfg, const Corpus& corpus) {
  CommandOutput out;
  const std::size_t chosen = selected_frame(corpus, cfg);
  const auto analyses = analyze_frames(corpus, cfg, out, is_voiced);

  CsvTable asym{{"frame", "cp_lpc", "cn_lpc", "asymmetry_lpc", "cp_nlpc", "cn_nlpc",
                 "asymmetry_nlpc"},
                {}};
  std::vector<std::pair<std::string, ResidualHistogram>> chosen_hists;
  for (const FrameAnalysis& a : analyses) {
    const ResidualHistogram hl = residual_histogram(a.residual_lpc);
    const ResidualHistogram hn = residual_histogram(a.residual_nlpc);
    asym.add_row({num(corpus.frames[a.corpus_index].frame.index), num(hl.cp), num(hl.cn),
                  num(hl.asymmetry), num(hn.cp), num(hn.cn), num(hn.asymmetry)});
    if (a.corpus_index == chosen) chosen_hists = {{"lpc", hl}, {"nlpc", hn}};
  }
  if (chosen_hists.empty()) {
    // The chosen frame is not voiced; analyze it on its own.
    FrameAnalysis a = analyze_frame(corpus.frames[chosen].frame, cfg);
    chosen_hists = {{"lpc", residual_histogram(a.residual_lpc)},
                    {"nlpc", residual_histogram(a.residual_nlpc)}};
  }
  add_file(out, "residual_hist.csv", histogram_csv(chosen_hists).str());
  CsvTable summary{{"frame", "predictor", "cp", "cn", "zeros", "asymmetry"}, {}};
  for (const auto& [name, h] : chosen_hists)
    summary.add_row({num(corpus.frames[chosen].frame.index), name, num(h.cp), num(h.cn),
                     num(h.zeros), num(h.asymmetry)});
  add_file(out, "residual_hist_summary.csv", summary.str());
  add_file(out, "residual_asymmetry.csv", asym.str());
  if (cfg.emit_svg) {
    std::vector<SvgSeries> series;
    for (const auto& [name, h] : chosen_hists) {
      SvgSeries s{name, {}, {}};
      for (std::size_t b = 0; b < h.counts.size(); ++b) {
        s.x.push_back(0.5 * (h.edges[b] + h.edges[b + 1]));
        s.y.push_back(double(h.counts[b]));
      }
      series.push_back(std::move(s));
    }
    add_file(out, "residual_hist.svg", svg_chart("Prediction error histograms", series));
  }
  return out;
}

CommandOutput cmd_quant_sweep(const RunConfig& cfg, const Corpus& corpus) {
  CommandOutput out;
  std::vector<FrameAnalysis> analyses;
  if (cfg.frame_index) {
    const std::size_t i = selected_frame(corpus, cfg);
    FrameAnalysis a = analyze_frame(corpus.frames[i].frame, cfg);
    a.corpus_index = i;
    out.parameters.push_back(frame_parameters(corpus, a));
    analyses.push_back(std::move(a));
  } else {
    analyses = analyze_frames(corpus, cfg, out, is_voiced);
  }
  const SweepOptions options{cfg.quantize_all_layers, QuantizerStyle::kMidrise};
  CsvTable csv{{"frame", "mode", "bits", "gp_lpc_db", "gp_nlpc_db", "lpc_diverged",
                "nlpc_diverged", "gp_lpc_unquantized_db", "gp_nlpc_unquantized_db"},
               {}};
  std::vector<SvgSeries> series;
  for (const FrameAnalysis& a : analyses) {
    const Frame& frame = corpus.frames[a.corpus_index].frame;
    const QuantSweepResult r =
        cfg.sweep_mode == SweepMode::kAnalysis
            ? analysis_gain_sweep(frame, a.lpc, a.mlp.best, cfg.bits_list, options)
            : synthesis_gain_sweep(frame, a.lpc, a.mlp.best, cfg.bits_list, options);
    for (std::size_t b = 0; b < r.bits_axis.size(); ++b)
      csv.add_row({num(frame.index), mode_name(r.mode), num(Eigen::Index(r.bits_axis[b])),
                   num(r.gp_lpc[b]), num(r.gp_nlpc[b]), r.lpc_diverged[b] ? "1" : "0",
                   r.nlpc_diverged[b] ? "1" : "0", num(r.gp_lpc_unquantized),
                   num(r.gp_nlpc_unquantized)});
    if (cfg.emit_svg && series.empty()) {
      std::vector<double> x(r.bits_axis.begin(), r.bits_axis.end());
      series = {{"LPC-12", x, r.gp_lpc}, {"NLPC", x, r.gp_nlpc}};
    }
  }
  add_file(out, "quant_sweep_" + mode_name(cfg.sweep_mode) + ".csv", csv.str());
  if (cfg.emit_svg)
    add_file(out, "quant_sweep_" + mode_name(cfg.sweep_mode) + ".svg",
             svg_chart("Gp vs quantization bits (" + mode_name(cfg.sweep_mode) + ")", series));
  return out;
}

CommandOutput cmd_residual_quant(const RunConfig& cfg, const Corpus& corpus) {
  CommandOutput out;
  const std::size_t first = selected_frame(corpus, cfg);
  const CorpusFrame& cf = corpus.frames[first];
  FrameAnalysis a = analyze_frame(cf.frame, cfg);
  a.corpus_index = first;
  out.parameters.push_back(frame_parameters(corpus, a));

  // The segment starts at the chosen frame and spans up to segment_frames
  // frames of the same input file.
  Eigen::Index frames = 1;
  while (frames < cfg.segment_frames && first + std::size_t(frames) < corpus.frames.size() &&
         corpus.frames[first + std::size_t(frames)].input == cf.input)
    ++frames;
  const AudioSignal& signal = corpus.signals[cf.input];
  Eigen::Index file_frame = 0;
  for (std::size_t i = 0; i < first; ++i)
    if (corpus.frames[i].input == cf.input) ++file_frame;
  const Eigen::Index start = file_frame * cfg.frame.frame_len;
  const Eigen::Index len = frames * cfg.frame.frame_len;
  Eigen::VectorXd window(cf.frame.history.size() + len);
  window << cf.frame.history, signal.samples.segment(start, len);

  const ResidualQuantResult r = residual_quant_experiment(window, cf.frame.history.size(), a.lpc,
                                                          a.mlp.best, cfg.residual_bits);
  CsvTable csv{{"n", "error_lpc", "error_nlpc"}, {}};
  for (Eigen::Index n = 0; n < len; ++n)
    csv.add_row({num(n), num(r.lpc.reconstruction_error[n]), num(r.nlpc.reconstruction_error[n])});
  add_file(out, "residual_quant.csv", csv.str());

  CsvTable summary{{"frame", "predictor", "bits", "step", "useful_duration", "broke_down",
                    "mean_error_first50"},
                   {}};
  for (const auto& [name, o] : {std::pair{"lpc", &r.lpc}, std::pair{"nlpc", &r.nlpc}}) {
    const Eigen::Index head = std::min<Eigen::Index>(50, o->reconstruction_error.size());
    summary.add_row({num(cf.frame.index), name, num(Eigen::Index(o->bits)), num(o->step),
                     num(o->useful_duration), o->broke_down ? "1" : "0",
                     num(o->reconstruction_error.head(head).mean())});
  }
  add_file(out, "residual_quant_summary.csv", summary.str());
  if (cfg.emit_svg) {
    const auto x = iota_axis(std::size_t(len), 0.0);
    std::vector<double> el(r.lpc.reconstruction_error.begin(), r.lpc.reconstruction_error.end());
    std::vector<double> en(r.nlpc.reconstruction_error.begin(), r.nlpc.reconstruction_error.end());
    add_file(out, "residual_quant.svg",
             svg_chart("Reconstruction error, quantized residual", {{"LPC", x, el}, {"NN", x, en}}));
  }
  return out;
}

CommandOutput cmd_lattice_report(const RunConfig& cfg, const Corpus& corpus) {
  CommandOutput out;
  const auto analyses = analyze_frames(corpus, cfg, out, is_speech);
  std::vector<FrameNets> nets;
  for (const FrameAnalysis& a : analyses)
    nets.push_back({corpus.frames[a.corpus_index].frame.index, a.mlp.best, to_lattice(a.mlp.best)});
  if (nets.empty()) throw Error(ErrorKind::kEmptyInput, "no trained frames for the lattice report");
  const DispersionReport d = dispersion_report(nets);

  CsvTable per_frame{{"frame", "sigma_fir", "sigma_lattice", "log10_ratio", "w11", "w11_display", "k1"}, {}};
  for (std::size_t i = 0; i < d.frame_index.size(); ++i)
    per_frame.add_row({num(d.frame_index[i]), num(d.sigma_fir[i]), num(d.sigma_lattice[i]),
                       num(d.log_ratio[i]), num(d.w11[i]), num(d.w11_display[i]), num(d.k1[i])});
  add_file(out, "lattice_dispersion.csv", per_frame.str());

  const auto above = std::count_if(d.log_ratio.begin(), d.log_ratio.end(),
                                   [](double r) { return r > 0.0; });
  CsvTable summary{{"frames", "singular_frames", "fraction_fir_wider", "variance_fir",
                    "variance_lattice", "variance_ratio", "w11_range", "k1_range"},
                   {}};
  summary.add_row({num(Eigen::Index(d.frame_index.size())), num(d.singular_frames),
                   num(d.frame_index.empty() ? 0.0 : double(above) / double(d.frame_index.size())),
                   num(d.variance_fir), num(d.variance_lattice), num(d.variance_ratio),
                   num(d.w11_range), num(d.k1_range)});
  add_file(out, "lattice_summary.csv", summary.str());
  if (cfg.emit_svg) {
    std::vector<double> x(d.frame_index.begin(), d.frame_index.end());
    add_file(out, "lattice_log_ratio.svg",
             svg_chart("log10 sigma(fir)/sigma(lattice)", {{"log ratio", x, d.log_ratio}}));
    add_file(out, "lattice_trajectory.svg",
             svg_chart("w_11 (clipped) and K_1", {{"w_11", x, d.w11_display}, {"K_1", x, d.k1}}));
  }
  return out;
}

}  // namespace

InputSpec InputSpec::parse(const std::string& text) {
  InputSpec spec;
  const auto first = text.find(':');
  spec.path = text.substr(0, first);
  if (first != std::string::npos) {
    const auto second = text.find(':', first + 1);
    spec.speaker = text.substr(first + 1, second == std::string::npos ? std::string::npos
                                                                      : second - first - 1);
    if (second != std::string::npos) spec.sex = text.substr(second + 1);
  }
  if (spec.path.empty()) throw Error(ErrorKind::kArgument, "empty input path");
  return spec;
}

void RunConfig::validate() const {
  static const std::set<std::string> commands = {"gains", "train-curve", "init-sensitivity",
                                                 "scatter", "residual-hist", "quant-sweep",
                                                 "residual-quant", "lattice-report"};
  if (!commands.count(command)) throw Error(ErrorKind::kArgument, "unknown command: " + command);
  if (inputs.empty()) throw Error(ErrorKind::kArgument, "no input files");
  for (const InputSpec& in : inputs)
    if (!std::filesystem::exists(in.path))
      throw Error(ErrorKind::kIo, "input does not exist: " + in.path.string());
  frame.validate();
  train.validate();
  if (lpc_order < 1 || lpc_order > frame.history_len)
    throw Error(ErrorKind::kArgument, "lpc order must lie in [1, history_len]");
  if (train.n_inputs > frame.history_len)
    throw Error(ErrorKind::kArgument, "network inputs exceed history_len");
  if (bits_list.empty()) throw Error(ErrorKind::kArgument, "empty bits list");
  for (std::size_t i = 0; i < bits_list.size(); ++i) {
    if (bits_list[i] < 1 || bits_list[i] > 52)
      throw Error(ErrorKind::kArgument, "bit depths must lie in [1, 52]");
    if (i && bits_list[i] <= bits_list[i - 1])
      throw Error(ErrorKind::kArgument, "bits list must be strictly increasing");
  }
  if (residual_bits < 1 || residual_bits > 52)
    throw Error(ErrorKind::kArgument, "residual bits must lie in [1, 52]");
  if (segment_frames < 1) throw Error(ErrorKind::kArgument, "segment_frames must be positive");
}

void to_json(json& j, const RunConfig& cfg) {
  json inputs = json::array();
  for (const InputSpec& in : cfg.inputs)
    inputs.push_back({{"path", in.path.string()}, {"speaker", in.speaker}, {"sex", in.sex}});
  j = {{"command", cfg.command},
       {"inputs", inputs},
       {"frame_len", cfg.frame.frame_len},
       {"history_len", cfg.frame.history_len},
       {"epochs", cfg.train.epochs},
       {"inits", cfg.train.n_inits},
       {"hidden", cfg.train.n_hidden},
       {"network_inputs", cfg.train.n_inputs},
       {"algorithm", algorithm_name(cfg.train.algorithm)},
       {"lm_mu0", cfg.train.lm_mu0},
       {"lm_mu_inc", cfg.train.lm_mu_inc},
       {"lm_mu_dec", cfg.train.lm_mu_dec},
       {"lm_mu_max", cfg.train.lm_mu_max},
       {"bp_learning_rate", cfg.train.bp_learning_rate},
       {"seed", cfg.train.rng_seed},
       {"order", cfg.lpc_order},
       {"hamming", cfg.hamming},
       {"bits_list", cfg.bits_list},
       {"mode", mode_name(cfg.sweep_mode)},
       {"quantize_all_layers", cfg.quantize_all_layers},
       {"residual_bits", cfg.residual_bits},
       {"segment_frames", cfg.segment_frames},
       {"emit_svg", cfg.emit_svg}};
  j["frame_index"] = cfg.frame_index ? json(*cfg.frame_index) : json(nullptr);
}

void from_json(const json& j, RunConfig& cfg) {
  cfg = RunConfig{};
  cfg.command = j.at("command").get<std::string>();
  for (const json& in : j.at("inputs"))
    cfg.inputs.push_back({in.at("path").get<std::string>(), in.value("speaker", ""),
                          in.value("sex", "")});
  cfg.frame.frame_len = j.at("frame_len").get<Eigen::Index>();
  cfg.frame.history_len = j.at("history_len").get<Eigen::Index>();
  cfg.train.epochs = j.at("epochs").get<int>();
  cfg.train.n_inits = j.at("inits").get<int>();
  cfg.train.n_hidden = j.at("hidden").get<Eigen::Index>();
  cfg.train.n_inputs = j.at("network_inputs").get<Eigen::Index>();
  cfg.train.algorithm = j.at("algorithm").get<std::string>() == "backprop"
                            ? TrainAlgorithm::kBackprop
                            : TrainAlgorithm::kLevenbergMarquardt;
  cfg.train.lm_mu0 = j.at("lm_mu0").get<double>();
  cfg.train.lm_mu_inc = j.at("lm_mu_inc").get<double>();
  cfg.train.lm_mu_dec = j.at("lm_mu_dec").get<double>();
  cfg.train.lm_mu_max = j.at("lm_mu_max").get<double>();
  cfg.train.bp_learning_rate = j.at("bp_learning_rate").get<double>();
  cfg.train.rng_seed = j.at("seed").get<std::uint64_t>();
  cfg.lpc_order = j.at("order").get<Eigen::Index>();
  cfg.hamming = j.at("hamming").get<bool>();
  cfg.bits_list = j.at("bits_list").get<std::vector<int>>();
  cfg.sweep_mode =
      j.at("mode").get<std::string>() == "synthesis" ? SweepMode::kAnalysisSynthesis : SweepMode::kAnalysis;
  cfg.quantize_all_layers = j.at("quantize_all_layers").get<bool>();
  cfg.residual_bits = j.at("residual_bits").get<int>();
  cfg.segment_frames = j.at("segment_frames").get<Eigen::Index>();
  cfg.emit_svg = j.at("emit_svg").get<bool>();
  if (!j.at("frame_index").is_null()) cfg.frame_index = j.at("frame_index").get<Eigen::Index>();
}

Corpus load_corpus(const RunConfig& cfg) {
  Corpus corpus;
  Eigen::Index next_index = 0;
  for (std::size_t f = 0; f < cfg.inputs.size(); ++f) {
    AudioSignal signal = normalize_peak(load_audio(cfg.inputs[f].path));
    FrameConfig fc = cfg.frame;
    fc.sample_rate_hz = signal.sample_rate_hz;
    for (Frame& frame : frame_signal(signal, fc)) {
      frame.index = next_index++;
      corpus.frames.push_back({std::move(frame), f});
    }
    corpus.signals.push_back(std::move(signal));
  }
  return corpus;
}

FrameAnalysis analyze_frame(const Frame& frame, const RunConfig& cfg) {
  FrameAnalysis a;
  a.lpc = analyze_lpc(frame.body, cfg.lpc_order, cfg.hamming);
  a.residual_lpc = lpc_residual(a.lpc, frame);
  a.gp_lpc = prediction_gain(frame.body, a.residual_lpc).gp_db;
  a.mlp = train_multi_init(frame, cfg.train);
  a.residual_nlpc = mlp_predict_frame(a.mlp.best, frame).residual;
  a.gp_nlpc = prediction_gain(frame.body, a.residual_nlpc).gp_db;
  return a;
}

std::size_t designated_frame(const Corpus& corpus) {
  if (corpus.frames.empty()) throw Error(ErrorKind::kEmptyInput, "empty corpus");
  std::size_t best = 0;
  double best_energy = -1.0;
  bool best_voiced = false;
  for (std::size_t i = 0; i < corpus.frames.size(); ++i) {
    const bool voiced = is_voiced(corpus.frames[i]);
    const double energy = corpus.frames[i].frame.body.squaredNorm();
    if ((voiced && !best_voiced) || (voiced == best_voiced && energy > best_energy)) {
      best = i;
      best_energy = energy;
      best_voiced = voiced;
    }
  }
  return best;
}

std::size_t selected_frame(const Corpus& corpus, const RunConfig& cfg) {
  if (!cfg.frame_index) return designated_frame(corpus);
  for (std::size_t i = 0; i < corpus.frames.size(); ++i)
    if (corpus.frames[i].frame.index == *cfg.frame_index) return i;
  throw Error(ErrorKind::kArgument, "frame index " + std::to_string(*cfg.frame_index) +
                                        " out of range (corpus has " +
                                        std::to_string(corpus.frames.size()) + " frames)");
}

CommandOutput run_command(const RunConfig& cfg) {
  cfg.validate();
  const Corpus corpus = load_corpus(cfg);
  if (cfg.command == "gains") return cmd_gains(cfg, corpus);
  if (cfg.command == "train-curve") return cmd_train_curve(cfg, corpus);
  if (cfg.command == "init-sensitivity") return cmd_init_sensitivity(cfg, corpus);
  if (cfg.command == "scatter") return cmd_scatter(cfg, corpus);
  if (cfg.command == "residual-hist") return cmd_residual_hist(cfg, corpus);
  if (cfg.command == "quant-sweep") return cmd_quant_sweep(cfg, corpus);
  if (cfg.command == "residual-quant") return cmd_residual_quant(cfg, corpus);
  return cmd_lattice_report(cfg, corpus);
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json write_run(const RunConfig& cfg, const CommandOutput& output, double seconds) {
  std::filesystem::create_directories(cfg.out_dir);
  json outputs = json::object();
  for (const auto& [name, contents] : output.files) {
    const auto path = cfg.out_dir / name;
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorKind::kIo, "cannot write " + path.string());
    file << contents;
    outputs[name] = content_hash(contents);
  }
  json manifest = {{"tool", "nlpc"},
                   {"version", kToolVersion},
                   {"config", cfg},
                   {"seed", cfg.train.rng_seed},
                   {"outputs", outputs},
                   {"parameters", output.parameters},
                   {"log", output.log},
                   {"timings", {{"total_seconds", seconds}}}};
  const auto path = cfg.out_dir / "manifest.json";
  std::ofstream file(path);
  if (!file) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  file << manifest.dump(2) << '\n';
  return manifest;
}

ReplayResult replay_manifest(const std::filesystem::path& manifest_path,
                             const std::filesystem::path& out_dir) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + manifest_path.string());
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("manifest: ") + e.what());
  }
  RunConfig cfg;
  try {
    cfg = manifest.at("config").get<RunConfig>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("manifest config: ") + e.what());
  }
  cfg.out_dir = out_dir;
  const CommandOutput output = run_command(cfg);
  write_run(cfg, output, 0.0);

  ReplayResult result;
  const json& expected = manifest.at("outputs");
  std::set<std::string> seen;
  for (const auto& [name, contents] : output.files) {
    seen.insert(name);
    if (expected.contains(name) && expected.at(name).get<std::string>() == content_hash(contents))
      result.matched.push_back(name);
    else
      result.mismatched.push_back(name);
  }
  for (const auto& item : expected.items())
    if (!seen.count(item.key())) result.mismatched.push_back(item.key());
  return result;
}

}  // namespace nlpc

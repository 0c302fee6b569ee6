// tools/breathdet_main.cc

// Copyright 2025  breathdet contributors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line surface. Exit codes are part of the contract:
//   0  all outputs written
//   1  unexpected failure
//   2  bad primary input (too few exemplars, missing model file, invalid
//      scene script, single-class training data, malformed CSV)
//   3  audio decode failure
//   4  model built under a different frontend configuration
//   5  training solve too ill-conditioned to accept
// Any failure removes the outputs the run had already written.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "breathdet/audio.h"
#include "breathdet/breath_template.h"
#include "breathdet/config.h"
#include "breathdet/error.h"
#include "breathdet/events.h"
#include "breathdet/lpc.h"
#include "breathdet/pattern.h"
#include "breathdet/pipeline.h"
#include "breathdet/svm.h"
#include "breathdet/synth.h"
#include "breathdet/types.h"

namespace {

namespace fs = std::filesystem;
using namespace breathdet;

// Removes everything a failed run managed to write.
class OutputTracker {
 public:
  ~OutputTracker() {
    if (committed_) return;
    for (const std::string &p : paths_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }
  std::string track(const std::string &path) {
    paths_.push_back(path);
    return path;
  }
  void commit() { committed_ = true; }

 private:
  std::vector<std::string> paths_;
  bool committed_ = false;
};

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = ".";
  long long seed = -1;  // < 0 means "not given"
};

ToolConfig load_effective_config(const GlobalArgs &g) {
  ToolConfig cfg;
  if (!g.config_path.empty()) cfg = load_config_file(g.config_path);
  if (g.seed >= 0) cfg.svm.seed = static_cast<std::uint32_t>(g.seed);
  return cfg;
}

std::string join_out(const GlobalArgs &g, const std::string &name) {
  return (fs::path(g.out_dir) / name).string();
}

void echo_config(const ToolConfig &cfg, const GlobalArgs &g,
                 OutputTracker *tracker) {
  fs::create_directories(g.out_dir);
  std::ofstream out(tracker->track(join_out(g, "config.echo.json")));
  out << config_to_json(cfg);
}

bool is_decode_error(ErrorCode c) {
  return c == ErrorCode::UnsupportedFormat || c == ErrorCode::CorruptHeader ||
         c == ErrorCode::EmptyAudio;
}

AudioBuffer load_audio_for(const ToolConfig &cfg, const std::string &path,
                           bool peak_norm) {
  AudioBuffer buf = load_wav(path);
  if (buf.sample_rate != cfg.frontend.sample_rate)
    buf = resample(buf, cfg.frontend.sample_rate);
  if (peak_norm) peak_normalize(&buf);
  return buf;
}

std::vector<AudioBuffer> load_exemplar_dir(const ToolConfig &cfg,
                                           const std::string &dir,
                                           bool peak_norm) {
  std::vector<std::string> paths;
  if (fs::is_directory(dir))
    for (const fs::directory_entry &entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".wav")
        paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  if (paths.size() < 2)
    throw Error(ErrorCode::TooFewExemplars,
                "need at least 2 exemplar WAVs in " + dir);
  std::vector<AudioBuffer> exemplars;
  for (const std::string &p : paths)
    exemplars.push_back(load_audio_for(cfg, p, peak_norm));
  return exemplars;
}

void require_model_file(const std::string &flag, const std::string &path) {
  if (path.empty())
    throw Error(ErrorCode::InvalidArgument,
                flag + " is required for this detector");
  if (!fs::is_regular_file(path))
    throw Error(ErrorCode::InvalidArgument, "model file missing: " + path);
}

// ---- template ----

struct TemplateArgs {
  std::string exemplar_dir;
  std::string lpc_out;
  bool peak_normalize = false;
};

int cmd_template(const GlobalArgs &g, const TemplateArgs &a) {
  OutputTracker tracker;
  try {
    const ToolConfig cfg = load_effective_config(g);
    echo_config(cfg, g, &tracker);
    const std::vector<AudioBuffer> exemplars =
        load_exemplar_dir(cfg, a.exemplar_dir, a.peak_normalize);
    const BreathTemplate tmpl = build_template(
        exemplars, cfg.frontend, cfg.mel, cfg.pattern.target_subframes);
    save_template(tmpl, tracker.track(join_out(g, "template.bt1")));
    std::printf("exemplars=%d template=%zux%zu\n", tmpl.n_exemplars,
                tmpl.mean.rows, tmpl.mean.cols);
    if (!a.lpc_out.empty()) {
      const LpcModel model = fit_lpc_from_exemplars(exemplars, cfg);
      const fs::path p(a.lpc_out);
      const std::string out =
          p.is_absolute() ? a.lpc_out : join_out(g, a.lpc_out);
      save_lpc_model(tracker.track(out), model);
      std::printf("lpc_order=%d lpc_gain=%.6f\n", model.order, model.gain);
    }
    tracker.commit();
    return 0;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::TooFewExemplars) return 2;
    if (is_decode_error(e.code())) return 3;
    return 1;
  }
}

// ---- detect ----

struct DetectArgs {
  std::string audio;
  std::string detector = "pattern";
  std::string template_path;
  std::string lpc_model_path;
  std::string svm_model_path;
  std::string exec_mode = "serial";
  bool peak_normalize = false;
  bool adapt = false;
  double threshold = -1.0;       // < 0 keeps config value
  double gain_threshold = -1.0;  // < 0 keeps config value
};

int cmd_detect(const GlobalArgs &g, const DetectArgs &a) {
  OutputTracker tracker;
  try {
    ToolConfig cfg = load_effective_config(g);
    if (a.threshold >= 0.0) cfg.pattern.threshold = a.threshold;
    if (a.gain_threshold >= 0.0) cfg.lpc.gain_threshold = a.gain_threshold;
    if (a.adapt) cfg.lpc.adapt = true;

    if (a.detector == "pattern") {
      require_model_file("--template", a.template_path);
    } else {
      require_model_file("--lpc-model", a.lpc_model_path);
      if (a.detector == "lpc-svm")
        require_model_file("--svm-model", a.svm_model_path);
    }

    echo_config(cfg, g, &tracker);
    const Exec exec =
        a.exec_mode == "parallel" ? Exec::parallel : Exec::serial;
    const AudioBuffer buf =
        load_audio_for(cfg, a.audio, a.peak_normalize);

    DetectResult result;
    if (a.detector == "pattern") {
      const BreathTemplate tmpl =
          load_template(a.template_path, cfg.frontend, cfg.mel);
      result = run_pattern_detect(buf, tmpl, cfg, exec);
    } else {
      const LpcModel model = load_lpc_model(a.lpc_model_path);
      if (model.order != cfg.lpc.order)
        throw Error(ErrorCode::ConfigMismatch,
                    "model order " + std::to_string(model.order) +
                        " differs from configured order " +
                        std::to_string(cfg.lpc.order));
      if (a.detector == "lpc") {
        result = run_lpc_detect(buf, model, cfg);
      } else {
        const SvmModel svm = load_svm_model(a.svm_model_path);
        result = run_svm_detect(buf, model, svm, cfg);
      }
    }

    write_events_csv(result.events, tracker.track(join_out(g, "events.csv")));
    std::vector<RateEntry> rates = breathing_rates(result.events);
    screen_outliers(&rates);
    write_rates_csv(rates, tracker.track(join_out(g, "rates.csv")));
    write_durations_csv(result.events,
                        tracker.track(join_out(g, "durations.csv")));
    write_index_csv(result.index_times, result.index_values,
                    tracker.track(join_out(g, "index.csv")));
    std::printf("events=%zu rates=%zu\n", result.events.size(), rates.size());
    tracker.commit();
    return 0;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::InvalidArgument) return 2;
    if (is_decode_error(e.code())) return 3;
    if (e.code() == ErrorCode::ConfigMismatch ||
        e.code() == ErrorCode::FingerprintMismatch)
      return 4;
    return 1;
  }
}

// ---- synth ----

struct SynthArgs {
  std::string script;
};

int cmd_synth(const GlobalArgs &g, const SynthArgs &a) {
  OutputTracker tracker;
  try {
    const ToolConfig cfg = load_effective_config(g);
    SceneScript script = load_scene_script(a.script);
    if (g.seed >= 0) script.seed = static_cast<std::uint64_t>(g.seed);
    echo_config(cfg, g, &tracker);
    const RenderedScene scene = render_scene(script);
    save_wav_pcm16(scene.audio, tracker.track(join_out(g, "scene.wav")));
    save_ground_truth(tracker.track(join_out(g, "scene.truth.json")),
                      scene.truth);
    std::printf("duration_s=%.3f rate=%d inhales=%zu scale=%.6f\n",
                scene.audio.duration_s(), scene.audio.sample_rate,
                scene.truth.starts.size(), scene.scale);
    tracker.commit();
    return 0;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::CorruptFile ||
        e.code() == ErrorCode::InvalidArgument ||
        e.code() == ErrorCode::OverlapError)
      return 2;
    return 1;
  }
}

// ---- train-svm ----

struct TrainSvmArgs {
  std::string audio;
  std::string gain_csv;
  std::string truth;
  std::string lpc_model_path;
};

GainSeries read_gain_csv(const std::string &path, const ToolConfig &cfg) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::CorruptFile, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) ||
      (line != "time_s,score" && line != "time_s,score\r"))
    throw Error(ErrorCode::CorruptFile, "expected time_s,score in " + path);
  GainSeries series;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw Error(ErrorCode::CorruptFile, "bad row in " + path);
    try {
      series.times.push_back(std::stod(line.substr(0, comma)));
      series.gains.push_back(std::stod(line.substr(comma + 1)));
    } catch (...) {
      throw Error(ErrorCode::CorruptFile, "bad number in " + path);
    }
  }
  series.powers.assign(series.gains.size(), 0.0);
  series.step_s = series.times.size() > 1
                      ? series.times[1] - series.times[0]
                      : cfg.frontend.frame_step() /
                            static_cast<double>(cfg.frontend.sample_rate);
  series.frame_len_s = cfg.frontend.frame_len() /
                       static_cast<double>(cfg.frontend.sample_rate);
  return series;
}

int cmd_train_svm(const GlobalArgs &g, const TrainSvmArgs &a) {
  OutputTracker tracker;
  try {
    const ToolConfig cfg = load_effective_config(g);
    echo_config(cfg, g, &tracker);
    const GroundTruth truth = load_ground_truth(a.truth);

    if (a.gain_csv.empty() && a.audio.empty())
      throw Error(ErrorCode::InvalidArgument,
                  "one of --audio or --gain-csv is required");
    EvalCounts counts;
    SvmModel model;
    if (!a.gain_csv.empty()) {
      const GainSeries series = read_gain_csv(a.gain_csv, cfg);
      model = train_svm_from_gains(series, truth, cfg, &counts);
    } else {
      require_model_file("--lpc-model", a.lpc_model_path);
      const LpcModel lpc = load_lpc_model(a.lpc_model_path);
      const AudioBuffer buf = load_audio_for(cfg, a.audio, false);
      model = train_svm_from_scene(buf, truth, lpc, cfg, &counts);
    }
    save_svm_model(tracker.track(join_out(g, "model.svm1")), model);
    std::printf(
        "supports=%zu verify_accuracy=%.4f tp=%zu tn=%zu fp=%zu fn=%zu\n",
        model.support_inputs.rows, counts.accuracy(), counts.true_pos,
        counts.true_neg, counts.false_pos, counts.false_neg);
    tracker.commit();
    return 0;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::TooSmall) return 2;
    if (e.code() == ErrorCode::IllConditioned) return 5;
    if (is_decode_error(e.code())) return 3;
    return 1;
  }
}

// ---- report ----

struct ReportArgs {
  std::string events_csv;
  double hist_lo = 0.0;
  double hist_hi = 90.0;
  double hist_width = 5.0;
};

int cmd_report(const GlobalArgs &g, const ReportArgs &a) {
  OutputTracker tracker;
  try {
    const ToolConfig cfg = load_effective_config(g);
    echo_config(cfg, g, &tracker);
    const std::vector<BreathEvent> events = read_events_csv(a.events_csv);
    std::vector<RateEntry> rates = breathing_rates(events);
    screen_outliers(&rates);
    write_rates_csv(rates, tracker.track(join_out(g, "rates.csv")));
    write_durations_csv(events, tracker.track(join_out(g, "durations.csv")));
    std::vector<double> bpm;
    for (const RateEntry &r : rates) bpm.push_back(r.rate_bpm);
    const std::vector<HistogramBin> hist =
        fixed_histogram(bpm, a.hist_lo, a.hist_hi, a.hist_width);
    write_hist_csv(hist, tracker.track(join_out(g, "hist.csv")));

    std::size_t flagged = 0;
    for (const RateEntry &r : rates) flagged += r.flagged ? 1 : 0;
    std::size_t modal = 0;
    for (std::size_t i = 1; i < hist.size(); ++i)
      if (hist[i].count > hist[modal].count) modal = i;
    std::printf(
        "events=%zu rates=%zu flagged=%zu modal_rate_bin=[%g,%g) count=%zu\n",
        events.size(), rates.size(), flagged,
        hist.empty() ? 0.0 : hist[modal].lo,
        hist.empty() ? 0.0 : hist[modal].hi,
        hist.empty() ? 0 : hist[modal].count);
    tracker.commit();
    return 0;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::CorruptFile ||
        e.code() == ErrorCode::NonMonotonic)
      return 2;
    return 1;
  }
}

// ---- compare ----

struct CompareArgs {
  std::string events_path;
  std::string truth_path;
  double tolerance_s = 0.5;
};

int cmd_compare(const GlobalArgs &g, const CompareArgs &a) {
  OutputTracker tracker;
  try {
    const ToolConfig cfg = load_effective_config(g);
    echo_config(cfg, g, &tracker);
    const std::vector<BreathEvent> detected = read_events_csv(a.events_path);
    const GroundTruth truth = load_ground_truth(a.truth_path);
    std::vector<BreathEvent> reference;
    for (std::size_t i = 0; i < truth.starts.size(); ++i) {
      BreathEvent e;
      e.start_s = truth.starts[i];
      e.end_s = truth.ends[i];
      e.duration_s = truth.ends[i] - truth.starts[i];
      e.detector = "truth";
      reference.push_back(e);
    }
    const CompareResult result =
        compare_events(detected, reference, a.tolerance_s);

    std::ofstream out(tracker.track(join_out(g, "compare.csv")));
    if (!out)
      throw Error(ErrorCode::CorruptFile, "cannot write compare.csv");
    out << "status,detected_time_s,reference_time_s,start_error_s,"
           "duration_error_s\n";
    char buf[256];
    for (const EventMatch &m : result.matches) {
      std::snprintf(buf, sizeof(buf), "matched,%.6f,%.6f,%.6f,%.6f\n",
                    detected[m.detected_idx].start_s,
                    reference[m.reference_idx].start_s, m.start_error_s,
                    m.duration_error_s);
      out << buf;
    }
    for (std::size_t d : result.false_alarms) {
      std::snprintf(buf, sizeof(buf), "false_alarm,%.6f,,,\n",
                    detected[d].start_s);
      out << buf;
    }
    for (std::size_t r : result.missed_refs) {
      std::snprintf(buf, sizeof(buf), "missed,,%.6f,,\n",
                    reference[r].start_s);
      out << buf;
    }
    std::printf("matched=%zu missed=%zu false_alarms=%zu recall=%.4f "
                "precision=%.4f\n",
                result.matches.size(), result.missed_refs.size(),
                result.false_alarms.size(), result.recall(),
                result.precision());
    tracker.commit();
    return 0;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::CorruptFile) return 2;
    return 1;
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"breathdet: locate SCBA inhalation sounds in audio and "
               "derive breathing-rate reports"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalArgs g;
  app.add_option("--config", g.config_path, "JSON config file");
  app.add_option("--seed", g.seed,
                 "Override the RNG seed (train-svm split, synth scene)");
  app.add_option("--out", g.out_dir, "Output directory (default .)");

  TemplateArgs ta;
  CLI::App *t = app.add_subcommand(
      "template", "Build the inhalation template from exemplar WAVs");
  t->add_option("exemplar_dir", ta.exemplar_dir, "Directory of WAV files")
      ->required();
  t->add_option("--lpc-out", ta.lpc_out,
                "Also fit the all-pole inhalation model, write it here");
  t->add_flag("--peak-normalize", ta.peak_normalize,
              "Peak-normalize exemplars before use");

  DetectArgs da;
  CLI::App *d =
      app.add_subcommand("detect", "Detect inhalation events in a WAV");
  d->add_option("audio", da.audio, "Input WAV")->required();
  d->add_option("--detector", da.detector, "pattern | lpc | lpc-svm")
      ->check(CLI::IsMember({"pattern", "lpc", "lpc-svm"}));
  d->add_option("--template", da.template_path, "bt1 template (pattern)");
  d->add_option("--lpc-model", da.lpc_model_path,
                "lpc1 model (lpc, lpc-svm)");
  d->add_option("--svm-model", da.svm_model_path, "svm1 model (lpc-svm)");
  d->add_option("--exec", da.exec_mode, "serial | parallel")
      ->check(CLI::IsMember({"serial", "parallel"}));
  d->add_flag("--peak-normalize", da.peak_normalize,
              "Peak-normalize input before detection");
  d->add_flag("--adapt", da.adapt, "Adapt the LPC model during tracking");
  d->add_option("--threshold", da.threshold,
                "Pattern detector threshold override");
  d->add_option("--gain-threshold", da.gain_threshold,
                "LPC gain threshold override");

  SynthArgs sa;
  CLI::App *s = app.add_subcommand(
      "synth", "Render a scripted scene to WAV plus ground truth");
  s->add_option("script", sa.script, "Scene script JSON")->required();

  TrainSvmArgs tra;
  CLI::App *tr = app.add_subcommand(
      "train-svm", "Train the gain classifier from labeled data");
  tr->add_option("--audio", tra.audio, "Scene WAV (with --lpc-model)");
  tr->add_option("--gain-csv", tra.gain_csv,
                 "Precomputed gain track (time_s,score)");
  tr->add_option("--truth", tra.truth, "Ground-truth intervals (gt1 JSON)")
      ->required();
  tr->add_option("--lpc-model", tra.lpc_model_path, "lpc1 model");

  ReportArgs ra;
  CLI::App *r = app.add_subcommand(
      "report", "Derive rate/duration tables from an events CSV");
  r->add_option("events_csv", ra.events_csv, "events.csv input")->required();
  r->add_option("--hist-lo", ra.hist_lo, "Histogram lower bound (bpm)");
  r->add_option("--hist-hi", ra.hist_hi, "Histogram upper bound (bpm)");
  r->add_option("--hist-width", ra.hist_width, "Histogram bin width (bpm)");

  CompareArgs ca;
  CLI::App *c = app.add_subcommand(
      "compare", "Match detected events against ground truth");
  c->add_option("--events", ca.events_path, "events.csv")->required();
  c->add_option("--truth", ca.truth_path, "gt1 JSON")->required();
  c->add_option("--tolerance", ca.tolerance_s,
                "Start-time match tolerance in seconds");

  CLI11_PARSE(app, argc, argv);

  try {
    if (t->parsed()) return cmd_template(g, ta);
    if (d->parsed()) return cmd_detect(g, da);
    if (s->parsed()) return cmd_synth(g, sa);
    if (tr->parsed()) return cmd_train_svm(g, tra);
    if (r->parsed()) return cmd_report(g, ra);
    if (c->parsed()) return cmd_compare(g, ca);
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

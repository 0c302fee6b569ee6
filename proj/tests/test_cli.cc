// tests/test_cli.cc

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

// End-to-end checks of the installed command surface: exit codes, output
// files, and determinism of reruns. Each scenario gets its own --out
// directory under one throwaway root.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "breathdet/audio.h"
#include "breathdet/config.h"
#include "breathdet/error.h"
#include "breathdet/events.h"
#include "breathdet/lpc.h"
#include "breathdet/pipeline.h"
#include "breathdet/svm.h"
#include "breathdet/synth.h"
#include "doctest.h"
#include "oracle.h"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string output;  // stdout and stderr combined
};

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::size_t count_lines(const std::string &text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n' ? 1 : 0;
  return n;
}

bool contains(const std::string &hay, const std::string &needle) {
  return hay.find(needle) != std::string::npos;
}

const std::string &suite_root() {
  static const std::string root = [] {
    const std::string r = oracle::temp_path("cli_suite");
    fs::remove_all(r);
    fs::create_directories(r);
    return r;
  }();
  return root;
}

CliResult run_cli(const std::string &args) {
  static int counter = 0;
  const std::string log =
      suite_root() + "/log_" + std::to_string(counter++) + ".txt";
  const std::string cmd =
      std::string(BREATHDET_CLI_PATH) + " " + args + " > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  if (status >= 0 && WIFEXITED(status)) r.code = WEXITSTATUS(status);
  r.output = slurp(log);
  return r;
}

std::string out_dir(const std::string &name) {
  const std::string d = suite_root() + "/" + name;
  fs::create_directories(d);
  return d;
}

breathdet::AudioBuffer exemplar_buffer(std::uint64_t seed) {
  breathdet::SceneScript script;
  script.duration_s = 0.75;
  script.seed = seed;
  breathdet::SceneSegment seg;
  seg.kind = "inhale";
  seg.start_s = 0.0;
  seg.duration_s = 0.75;
  seg.level = 0.3;
  seg.click_level = 0.0;
  seg.onset_trim_s = 0.4;
  script.segments.push_back(seg);
  return breathdet::render_scene(script).audio;
}

constexpr const char *kSceneScript = R"({
  "duration_s": 6.0,
  "rate": 16000,
  "seed": 9,
  "segments": [
    {"kind": "inhale", "start_s": 0.5, "dur_s": 1.0, "level": 0.3},
    {"kind": "exhale_pause", "start_s": 1.75, "dur_s": 0.7, "level": 0.12},
    {"kind": "inhale", "start_s": 3.5, "dur_s": 1.0, "level": 0.3},
    {"kind": "alarm_overlay", "start_s": 0.0, "dur_s": 6.0, "level": 0.035}
  ]
})";

// Shared inputs: exemplar WAV directory, a rendered scene, a noise-only
// recording, and a template directory produced by the tool itself.
struct Fixture {
  std::string exdir;
  std::string scene_script;
  std::string scene_wav;
  std::string noise_wav;
  std::string tdir;  // template.bt1 + model.lpc1
  CliResult template_run;
};

const Fixture &fixture() {
  static const Fixture fx = [] {
    Fixture f;
    f.exdir = out_dir("exemplars");
    for (int i = 0; i < 3; ++i)
      breathdet::save_wav_pcm16(exemplar_buffer(900 + i),
                                f.exdir + "/ex" + std::to_string(i) + ".wav");

    f.scene_script = suite_root() + "/scene.json";
    spit(f.scene_script, kSceneScript);
    breathdet::SceneScript script =
        breathdet::load_scene_script(f.scene_script);
    f.scene_wav = suite_root() + "/scene.wav";
    breathdet::save_wav_pcm16(breathdet::render_scene(script).audio,
                              f.scene_wav);

    oracle::TestRng rng(77);
    breathdet::AudioBuffer noise;
    noise.sample_rate = 16000;
    for (int i = 0; i < 48000; ++i) noise.samples.push_back(0.01 * rng.sym());
    f.noise_wav = suite_root() + "/noise.wav";
    breathdet::save_wav_pcm16(noise, f.noise_wav);

    f.tdir = out_dir("tpl");
    f.template_run = run_cli("--out " + f.tdir + " template " + f.exdir +
                             " --lpc-out model.lpc1");
    return f;
  }();
  return fx;
}

}  // namespace

TEST_CASE("synth renders scripted scenes deterministically") {
  const Fixture &fx = fixture();
  const std::string d1 = out_dir("synth1");

  const CliResult r1 = run_cli("--out " + d1 + " synth " + fx.scene_script);
  CHECK(r1.code == 0);
  CHECK(contains(r1.output, "inhales=2"));
  REQUIRE(fs::is_regular_file(d1 + "/scene.wav"));
  REQUIRE(fs::is_regular_file(d1 + "/scene.truth.json"));
  REQUIRE(fs::is_regular_file(d1 + "/config.echo.json"));

  const breathdet::GroundTruth truth =
      breathdet::load_ground_truth(d1 + "/scene.truth.json");
  REQUIRE(truth.starts.size() == 2);
  CHECK(truth.starts[0] == 0.5);
  CHECK(truth.starts[1] == 3.5);
  CHECK(truth.ends[1] == 4.5);

  const breathdet::ToolConfig echoed =
      breathdet::config_from_json(slurp(d1 + "/config.echo.json"));
  CHECK(echoed.frontend.sample_rate == 16000);
  CHECK(echoed.svm.seed == 7);

  SUBCASE("a rerun produces identical bytes") {
    const std::string d2 = out_dir("synth2");
    const CliResult r2 = run_cli("--out " + d2 + " synth " + fx.scene_script);
    CHECK(r2.code == 0);
    CHECK(slurp(d1 + "/scene.wav") == slurp(d2 + "/scene.wav"));
    CHECK(slurp(d1 + "/scene.truth.json") == slurp(d2 + "/scene.truth.json"));
  }
  SUBCASE("--seed overrides the script seed") {
    const std::string d3 = out_dir("synth_seed");
    const CliResult r3 =
        run_cli("--seed 123 --out " + d3 + " synth " + fx.scene_script);
    CHECK(r3.code == 0);
    CHECK(slurp(d1 + "/scene.wav") != slurp(d3 + "/scene.wav"));
  }
}

TEST_CASE("synth rejects bad scripts and cleans up") {
  SUBCASE("overlapping segments") {
    const std::string d = out_dir("synth_overlap");
    const std::string script = d + "/bad.json";
    spit(script, R"({"duration_s": 5.0, "segments": [
      {"kind": "inhale", "start_s": 1.0, "dur_s": 1.0},
      {"kind": "inhale", "start_s": 1.5, "dur_s": 1.0}
    ]})");
    const CliResult r = run_cli("--out " + d + " synth " + script);
    CHECK(r.code == 2);
    CHECK(contains(r.output, "OverlapError"));
    CHECK(!fs::exists(d + "/scene.wav"));
    CHECK(!fs::exists(d + "/config.echo.json"));
  }
  SUBCASE("unparseable JSON") {
    const std::string d = out_dir("synth_badjson");
    spit(d + "/bad.json", "{nope");
    CHECK(run_cli("--out " + d + " synth " + d + "/bad.json").code == 2);
  }
  SUBCASE("missing script file") {
    const std::string d = out_dir("synth_missing");
    CHECK(run_cli("--out " + d + " synth " + d + "/absent.json").code == 2);
  }
}

TEST_CASE("template builds from an exemplar directory") {
  const Fixture &fx = fixture();
  CHECK(fx.template_run.code == 0);
  CHECK(contains(fx.template_run.output, "exemplars=3"));
  CHECK(contains(fx.template_run.output, "template=13x30"));
  CHECK(contains(fx.template_run.output, "lpc_order=10"));
  REQUIRE(fs::is_regular_file(fx.tdir + "/template.bt1"));
  REQUIRE(fs::is_regular_file(fx.tdir + "/model.lpc1"));

  const breathdet::LpcModel model =
      breathdet::load_lpc_model(fx.tdir + "/model.lpc1");
  CHECK(model.order == 10);

  SUBCASE("a rerun produces identical bytes") {
    const std::string d2 = out_dir("tpl2");
    const CliResult r2 =
        run_cli("--out " + d2 + " template " + fx.exdir + " --lpc-out model.lpc1");
    CHECK(r2.code == 0);
    CHECK(slurp(fx.tdir + "/template.bt1") == slurp(d2 + "/template.bt1"));
    CHECK(slurp(fx.tdir + "/model.lpc1") == slurp(d2 + "/model.lpc1"));
  }
  SUBCASE("one exemplar is rejected") {
    const std::string one = out_dir("tpl_one_wav");
    fs::copy_file(fx.exdir + "/ex0.wav", one + "/ex0.wav",
                  fs::copy_options::overwrite_existing);
    const std::string d = out_dir("tpl_one_out");
    const CliResult r = run_cli("--out " + d + " template " + one);
    CHECK(r.code == 2);
    CHECK(!fs::exists(d + "/template.bt1"));
  }
  SUBCASE("an undecodable exemplar is a decode error") {
    const std::string bad = out_dir("tpl_bad_wav");
    fs::copy_file(fx.exdir + "/ex0.wav", bad + "/ex0.wav",
                  fs::copy_options::overwrite_existing);
    spit(bad + "/ex1.wav", "not audio");
    CHECK(run_cli("--out " + out_dir("tpl_bad_out") + " template " + bad)
              .code == 3);
  }
}

TEST_CASE("detect covers the three detectors and their failure modes") {
  const Fixture &fx = fixture();
  REQUIRE(fx.template_run.code == 0);

  SUBCASE("pattern detection runs and reruns identically") {
    const std::string d = out_dir("det_pat1");
    const CliResult r =
        run_cli("--out " + d + " detect " + fx.scene_wav +
                " --detector pattern --template " + fx.tdir + "/template.bt1");
    CHECK(r.code == 0);
    CHECK(contains(r.output, "events="));
    REQUIRE(fs::is_regular_file(d + "/events.csv"));
    REQUIRE(fs::is_regular_file(d + "/rates.csv"));
    REQUIRE(fs::is_regular_file(d + "/durations.csv"));
    REQUIRE(fs::is_regular_file(d + "/index.csv"));
    CHECK(slurp(d + "/index.csv").rfind("time_s,score\n", 0) == 0);

    const std::string d2 = out_dir("det_pat2");
    const CliResult r2 =
        run_cli("--out " + d2 + " detect " + fx.scene_wav +
                " --detector pattern --template " + fx.tdir + "/template.bt1");
    CHECK(r2.code == 0);
    CHECK(slurp(d + "/events.csv") == slurp(d2 + "/events.csv"));
    CHECK(slurp(d + "/index.csv") == slurp(d2 + "/index.csv"));

    const std::string d3 = out_dir("det_pat_parallel");
    const CliResult r3 = run_cli(
        "--out " + d3 + " detect " + fx.scene_wav +
        " --detector pattern --exec parallel --template " + fx.tdir +
        "/template.bt1");
    CHECK(r3.code == 0);
    CHECK(slurp(d + "/index.csv") == slurp(d3 + "/index.csv"));
    CHECK(slurp(d + "/events.csv") == slurp(d3 + "/events.csv"));
  }
  SUBCASE("pattern detection on noise finds nothing") {
    const std::string d = out_dir("det_noise");
    const CliResult r =
        run_cli("--out " + d + " detect " + fx.noise_wav +
                " --detector pattern --template " + fx.tdir + "/template.bt1");
    CHECK(r.code == 0);
    CHECK(breathdet::read_events_csv(d + "/events.csv").empty());
  }
  SUBCASE("an impossible threshold silences the pattern detector") {
    const std::string d = out_dir("det_thresh");
    const CliResult r = run_cli(
        "--out " + d + " detect " + fx.scene_wav +
        " --detector pattern --threshold 2.0 --template " + fx.tdir +
        "/template.bt1");
    CHECK(r.code == 0);
    CHECK(breathdet::read_events_csv(d + "/events.csv").empty());
    const breathdet::ToolConfig echoed =
        breathdet::config_from_json(slurp(d + "/config.echo.json"));
    CHECK(echoed.pattern.threshold == 2.0);
  }
  SUBCASE("whitening detection finds the scripted breaths") {
    const std::string d = out_dir("det_lpc");
    const CliResult r =
        run_cli("--out " + d + " detect " + fx.scene_wav +
                " --detector lpc --lpc-model " + fx.tdir + "/model.lpc1");
    CHECK(r.code == 0);
    const auto events = breathdet::read_events_csv(d + "/events.csv");
    CHECK(!events.empty());
    for (const breathdet::BreathEvent &e : events) CHECK(e.detector == "lpc");
  }
  SUBCASE("a zero gain threshold silences the whitening detector") {
    const std::string d = out_dir("det_gain0");
    const CliResult r = run_cli(
        "--out " + d + " detect " + fx.scene_wav +
        " --detector lpc --gain-threshold 0.0 --lpc-model " + fx.tdir +
        "/model.lpc1");
    CHECK(r.code == 0);
    CHECK(breathdet::read_events_csv(d + "/events.csv").empty());
  }
  SUBCASE("missing model arguments are input errors") {
    const std::string d = out_dir("det_missing");
    CHECK(run_cli("--out " + d + " detect " + fx.scene_wav +
                  " --detector pattern").code == 2);
    CHECK(run_cli("--out " + d + " detect " + fx.scene_wav +
                  " --detector pattern --template " + d + "/absent.bt1")
              .code == 2);
    CHECK(run_cli("--out " + d + " detect " + fx.scene_wav +
                  " --detector lpc-svm --lpc-model " + fx.tdir +
                  "/model.lpc1").code == 2);
  }
  SUBCASE("a frontend mismatch refuses the template and cleans up") {
    breathdet::ToolConfig other;
    other.mel.num_filters = 20;
    const std::string cfg_path = suite_root() + "/other_frontend.json";
    breathdet::save_config_file(other, cfg_path);
    const std::string d = out_dir("det_fpr");
    const CliResult r = run_cli(
        "--config " + cfg_path + " --out " + d + " detect " + fx.scene_wav +
        " --detector pattern --template " + fx.tdir + "/template.bt1");
    CHECK(r.code == 4);
    CHECK(contains(r.output, "FingerprintMismatch"));
    CHECK(!fs::exists(d + "/events.csv"));
    CHECK(!fs::exists(d + "/config.echo.json"));
  }
  SUBCASE("an order mismatch refuses the whitening model") {
    breathdet::ToolConfig low_order;
    low_order.lpc.order = 8;
    std::vector<breathdet::AudioBuffer> exemplars{exemplar_buffer(900),
                                                  exemplar_buffer(901)};
    const breathdet::LpcModel model =
        breathdet::fit_lpc_from_exemplars(exemplars, low_order);
    const std::string path = suite_root() + "/order8.lpc1";
    breathdet::save_lpc_model(path, model);
    const std::string d = out_dir("det_order");
    const CliResult r = run_cli("--out " + d + " detect " + fx.scene_wav +
                                " --detector lpc --lpc-model " + path);
    CHECK(r.code == 4);
    CHECK(contains(r.output, "ConfigMismatch"));
  }
  SUBCASE("an undecodable input is a decode error") {
    const std::string d = out_dir("det_corrupt");
    spit(d + "/corrupt.wav", "RIFFgarbage");
    CHECK(run_cli("--out " + d + " detect " + d + "/corrupt.wav" +
                  " --detector pattern --template " + fx.tdir +
                  "/template.bt1").code == 3);
  }
}

TEST_CASE("train-svm learns from a gain track") {
  const std::string d = out_dir("svm_fixture");
  const std::string csvdir = d;

  // Gains drop to 0.1 inside the labeled intervals; window 1 makes the
  // training set exactly separable.
  const std::string gains_csv = csvdir + "/gains.csv";
  {
    std::ofstream out(gains_csv);
    out << "time_s,score\n";
    char buf[64];
    for (int i = 0; i < 600; ++i) {
      const double t = 0.01 * i;
      const bool inside = (t >= 0.5 && t < 1.5) || (t >= 3.5 && t < 4.5);
      std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", t, inside ? 0.1 : 1.0);
      out << buf;
    }
  }
  breathdet::GroundTruth truth;
  truth.starts = {0.5, 3.5};
  truth.ends = {1.5, 4.5};
  const std::string truth_path = csvdir + "/truth.gt1";
  breathdet::save_ground_truth(truth_path, truth);

  breathdet::ToolConfig narrow;
  narrow.svm.feature_window = 1;
  const std::string cfg_path = csvdir + "/window1.json";
  breathdet::save_config_file(narrow, cfg_path);

  SUBCASE("separable data trains to perfect held-out accuracy") {
    const std::string o1 = out_dir("svm_train1");
    const CliResult r =
        run_cli("--config " + cfg_path + " --out " + o1 + " train-svm" +
                " --gain-csv " + gains_csv + " --truth " + truth_path);
    CHECK(r.code == 0);
    CHECK(contains(r.output, "verify_accuracy=1.0000"));
    REQUIRE(fs::is_regular_file(o1 + "/model.svm1"));
    const breathdet::SvmModel model =
        breathdet::load_svm_model(o1 + "/model.svm1");
    CHECK(model.feature_window == 1);

    const std::string o2 = out_dir("svm_train2");
    const CliResult r2 =
        run_cli("--config " + cfg_path + " --out " + o2 + " train-svm" +
                " --gain-csv " + gains_csv + " --truth " + truth_path);
    CHECK(r2.code == 0);
    CHECK(slurp(o1 + "/model.svm1") == slurp(o2 + "/model.svm1"));
  }
  SUBCASE("single-class truth is an input error") {
    breathdet::GroundTruth empty;
    const std::string empty_path = csvdir + "/empty.gt1";
    breathdet::save_ground_truth(empty_path, empty);
    const std::string o = out_dir("svm_oneclass");
    const CliResult r =
        run_cli("--config " + cfg_path + " --out " + o + " train-svm" +
                " --gain-csv " + gains_csv + " --truth " + empty_path);
    CHECK(r.code == 2);
    CHECK(!fs::exists(o + "/model.svm1"));
  }
  SUBCASE("an unsolvable system is reported as ill-conditioned") {
    breathdet::ToolConfig degenerate;
    degenerate.svm.feature_window = 1;
    const std::string deg_cfg = csvdir + "/degenerate.json";
    breathdet::save_config_file(degenerate, deg_cfg);

    // Non-finite scores poison every kernel entry, so the solve cannot
    // produce a finite dual vector.
    const std::string nan_csv = csvdir + "/nan_scores.csv";
    {
      std::ofstream out(nan_csv);
      out << "time_s,score\n";
      char buf[64];
      for (int i = 0; i < 40; ++i) {
        std::snprintf(buf, sizeof(buf), "%.6f,nan\n", 0.01 * i);
        out << buf;
      }
    }
    breathdet::GroundTruth half;
    half.starts = {0.0};
    half.ends = {0.2};
    const std::string half_path = csvdir + "/half.gt1";
    breathdet::save_ground_truth(half_path, half);

    const std::string o = out_dir("svm_illcond");
    const CliResult r =
        run_cli("--config " + deg_cfg + " --out " + o + " train-svm" +
                " --gain-csv " + nan_csv + " --truth " + half_path);
    CHECK(r.code == 5);
    CHECK(contains(r.output, "IllConditioned"));
    CHECK(!fs::exists(o + "/model.svm1"));
  }
}

TEST_CASE("report derives rate and duration tables") {
  const std::string d = out_dir("report_fixture");
  std::vector<breathdet::BreathEvent> events;
  for (double t : {10.0, 12.5, 15.0}) {
    breathdet::BreathEvent e;
    e.start_s = t;
    e.end_s = t + 1.0;
    e.duration_s = 1.0;
    e.detector = "pattern";
    events.push_back(e);
  }
  const std::string events_csv = d + "/events.csv";
  breathdet::write_events_csv(events, events_csv);

  SUBCASE("well-formed input produces the three tables") {
    const std::string o = out_dir("report1");
    const CliResult r = run_cli("--out " + o + " report " + events_csv);
    CHECK(r.code == 0);
    CHECK(contains(r.output, "events=3 rates=2 flagged=0"));
    CHECK(contains(r.output, "modal_rate_bin=[20,25) count=2"));
    CHECK(count_lines(slurp(o + "/rates.csv")) == 3);      // header + 2
    CHECK(count_lines(slurp(o + "/durations.csv")) == 4);  // header + 3
    CHECK(count_lines(slurp(o + "/hist.csv")) == 19);      // header + 18
  }
  SUBCASE("histogram layout follows the flags") {
    const std::string o = out_dir("report_hist");
    const CliResult r =
        run_cli("--out " + o + " report " + events_csv +
                " --hist-lo 0 --hist-hi 50 --hist-width 10");
    CHECK(r.code == 0);
    CHECK(count_lines(slurp(o + "/hist.csv")) == 6);  // header + 5
  }
  SUBCASE("a malformed CSV is an input error") {
    spit(d + "/bad.csv", "not,a,header\n1,2,3\n");
    CHECK(run_cli("--out " + out_dir("report_bad") + " report " + d +
                  "/bad.csv").code == 2);
  }
  SUBCASE("out-of-order events are an input error") {
    std::vector<breathdet::BreathEvent> dup = {events[0], events[0]};
    breathdet::write_events_csv(dup, d + "/dup.csv");
    CHECK(run_cli("--out " + out_dir("report_dup") + " report " + d +
                  "/dup.csv").code == 2);
  }
}

TEST_CASE("compare scores detections against ground truth") {
  const std::string d = out_dir("compare_fixture");
  std::vector<breathdet::BreathEvent> detected;
  breathdet::BreathEvent a;
  a.start_s = 10.1;
  a.end_s = 11.0;
  a.duration_s = 0.9;
  a.detector = "lpc";
  detected.push_back(a);
  breathdet::BreathEvent b;
  b.start_s = 30.0;
  b.end_s = 31.0;
  b.duration_s = 1.0;
  b.detector = "lpc";
  detected.push_back(b);
  const std::string events_csv = d + "/events.csv";
  breathdet::write_events_csv(detected, events_csv);

  breathdet::GroundTruth truth;
  truth.starts = {10.0, 20.0};
  truth.ends = {11.0, 21.0};
  const std::string truth_path = d + "/truth.gt1";
  breathdet::save_ground_truth(truth_path, truth);

  SUBCASE("default tolerance matches the near detection") {
    const std::string o = out_dir("compare1");
    const CliResult r = run_cli("--out " + o + " compare --events " +
                                events_csv + " --truth " + truth_path);
    CHECK(r.code == 0);
    CHECK(contains(r.output,
                   "matched=1 missed=1 false_alarms=1 recall=0.5000 "
                   "precision=0.5000"));
    const std::string csv = slurp(o + "/compare.csv");
    CHECK(contains(csv, "matched,10.100000,10.000000,0.100000,0.100000"));
    CHECK(contains(csv, "false_alarm,30.000000,,,"));
    CHECK(contains(csv, "missed,,20.000000,,"));
  }
  SUBCASE("a tight tolerance matches nothing") {
    const std::string o = out_dir("compare_tight");
    const CliResult r =
        run_cli("--out " + o + " compare --events " + events_csv +
                " --truth " + truth_path + " --tolerance 0.05");
    CHECK(r.code == 0);
    CHECK(contains(r.output, "matched=0 missed=2 false_alarms=2"));
  }
  SUBCASE("a missing events file is an input error") {
    CHECK(run_cli("--out " + out_dir("compare_missing") +
                  " compare --events " + d + "/absent.csv --truth " +
                  truth_path).code == 2);
  }
}

// src/config.cc

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

#include "breathdet/config.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "breathdet/error.h"
#include "json.hpp"

namespace breathdet {

using nlohmann::json;

const char *window_kind_name(WindowKind kind) {
  switch (kind) {
    case WindowKind::hamming: return "hamming";
    case WindowKind::half_hamming: return "half_hamming";
    case WindowKind::rectangular: return "rectangular";
  }
  return "unknown";
}

WindowKind window_kind_from_name(const std::string &name) {
  if (name == "hamming") return WindowKind::hamming;
  if (name == "half_hamming") return WindowKind::half_hamming;
  if (name == "rectangular") return WindowKind::rectangular;
  throw Error(ErrorCode::InvalidArgument, "unknown window kind '" + name + "'");
}

int FrameConfig::frame_len() const {
  return static_cast<int>(std::lround(frame_ms * sample_rate / 1000.0));
}

int FrameConfig::frame_step() const {
  return static_cast<int>(std::lround(step_ms * sample_rate / 1000.0));
}

namespace {

void check_keys(const json &j, const std::set<std::string> &allowed,
                const std::string &scope) {
  if (!j.is_object())
    throw Error(ErrorCode::InvalidArgument, scope + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw Error(ErrorCode::InvalidArgument,
                  "unknown config key '" + scope + "." + it.key() + "'");
  }
}

template <typename T>
void read_field(const json &j, const char *key, T *out) {
  if (j.contains(key)) *out = j.at(key).get<T>();
}

json frontend_to_json(const FrameConfig &c) {
  return json{{"sample_rate", c.sample_rate},
              {"frame_len_ms", c.frame_ms},
              {"step_ms", c.step_ms},
              {"pre_emphasis_alpha", c.preemphasis},
              {"window_kind", window_kind_name(c.window)}};
}

void frontend_from_json(const json &j, FrameConfig *c) {
  check_keys(j, {"sample_rate", "frame_len_ms", "step_ms",
                 "pre_emphasis_alpha", "window_kind"},
             "frontend");
  read_field(j, "sample_rate", &c->sample_rate);
  read_field(j, "frame_len_ms", &c->frame_ms);
  read_field(j, "step_ms", &c->step_ms);
  read_field(j, "pre_emphasis_alpha", &c->preemphasis);
  if (j.contains("window_kind"))
    c->window = window_kind_from_name(j.at("window_kind").get<std::string>());
  if (c->sample_rate <= 0)
    throw Error(ErrorCode::InvalidArgument, "sample_rate must be positive");
  if (c->step_ms <= 0 || c->step_ms > c->frame_ms)
    throw Error(ErrorCode::InvalidArgument,
                "need 0 < step_ms <= frame_len_ms");
  if (c->frame_ms < 5.0 || c->frame_ms > 100.0)
    throw Error(ErrorCode::InvalidArgument,
                "frame_len_ms outside [5, 100]");
  if (c->preemphasis < 0.0 || c->preemphasis > 1.0)
    throw Error(ErrorCode::InvalidArgument,
                "pre_emphasis_alpha outside [0, 1]");
}

json mel_to_json(const MelConfig &c) {
  return json{{"num_filters", c.num_filters},  {"num_coeffs", c.num_coeffs},
              {"fft_size", c.fft_size},        {"fmin_hz", c.fmin_hz},
              {"fmax_hz", c.fmax_hz},          {"lifter_L", c.lifter}};
}

void mel_from_json(const json &j, MelConfig *c) {
  check_keys(j, {"num_filters", "num_coeffs", "fft_size", "fmin_hz",
                 "fmax_hz", "lifter_L"},
             "mel");
  read_field(j, "num_filters", &c->num_filters);
  read_field(j, "num_coeffs", &c->num_coeffs);
  read_field(j, "fft_size", &c->fft_size);
  read_field(j, "fmin_hz", &c->fmin_hz);
  read_field(j, "fmax_hz", &c->fmax_hz);
  read_field(j, "lifter_L", &c->lifter);
  if (c->num_coeffs > c->num_filters)
    throw Error(ErrorCode::InvalidArgument, "num_coeffs > num_filters");
  if (c->fmin_hz <= 0 || c->fmin_hz >= c->fmax_hz)
    throw Error(ErrorCode::InvalidArgument, "need 0 < fmin_hz < fmax_hz");
  if (c->fft_size < 2 || (c->fft_size & (c->fft_size - 1)) != 0)
    throw Error(ErrorCode::InvalidArgument, "fft_size must be a power of two");
  if (c->lifter <= 0)
    throw Error(ErrorCode::InvalidArgument, "lifter_L must be positive");
}

json pattern_to_json(const PatternConfig &c) {
  return json{{"threshold", c.threshold},
              {"min_frames", c.min_frames},
              {"normalize", c.normalize},
              {"target_subframes", c.target_subframes}};
}

void pattern_from_json(const json &j, PatternConfig *c) {
  check_keys(j, {"threshold", "min_frames", "normalize", "target_subframes"},
             "pattern");
  read_field(j, "threshold", &c->threshold);
  read_field(j, "min_frames", &c->min_frames);
  read_field(j, "normalize", &c->normalize);
  read_field(j, "target_subframes", &c->target_subframes);
  if (c->threshold <= 0)
    throw Error(ErrorCode::InvalidArgument, "threshold must be positive");
  if (c->min_frames < 1)
    throw Error(ErrorCode::InvalidArgument, "min_frames must be >= 1");
  if (c->target_subframes < 1)
    throw Error(ErrorCode::InvalidArgument, "target_subframes must be >= 1");
}

json lpc_to_json(const LpcConfig &c) {
  return json{{"order", c.order},
              {"gain_threshold", c.gain_threshold},
              {"min_dur_s", c.min_dur_s},
              {"max_dur_s", c.max_dur_s},
              {"beta", c.beta},
              {"min_power_fraction", c.min_power_fraction},
              {"adapt", c.adapt}};
}

void lpc_from_json(const json &j, LpcConfig *c) {
  check_keys(j, {"order", "gain_threshold", "min_dur_s", "max_dur_s", "beta",
                 "min_power_fraction", "adapt"},
             "lpc");
  read_field(j, "order", &c->order);
  read_field(j, "gain_threshold", &c->gain_threshold);
  read_field(j, "min_dur_s", &c->min_dur_s);
  read_field(j, "max_dur_s", &c->max_dur_s);
  read_field(j, "beta", &c->beta);
  read_field(j, "min_power_fraction", &c->min_power_fraction);
  read_field(j, "adapt", &c->adapt);
  if (c->order < 1)
    throw Error(ErrorCode::InvalidArgument, "order must be >= 1");
  if (c->min_dur_s < 0 || c->max_dur_s < c->min_dur_s)
    throw Error(ErrorCode::InvalidArgument,
                "need 0 <= min_dur_s <= max_dur_s");
  if (c->beta <= 0 || c->beta > 1)
    throw Error(ErrorCode::InvalidArgument, "beta outside (0, 1]");
}

json svm_to_json(const SvmConfig &c) {
  return json{{"gamma", c.gamma},
              {"feature_window", c.feature_window},
              {"train_fraction", c.train_fraction},
              {"seed", c.seed},
              {"max_train_points", c.max_train_points},
              {"merge_gap_s", c.merge_gap_s}};
}

void svm_from_json(const json &j, SvmConfig *c) {
  check_keys(j, {"gamma", "feature_window", "train_fraction", "seed",
                 "max_train_points", "merge_gap_s"},
             "svm");
  read_field(j, "gamma", &c->gamma);
  read_field(j, "feature_window", &c->feature_window);
  read_field(j, "train_fraction", &c->train_fraction);
  read_field(j, "seed", &c->seed);
  read_field(j, "max_train_points", &c->max_train_points);
  read_field(j, "merge_gap_s", &c->merge_gap_s);
  if (c->gamma <= 0)
    throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
  if (c->feature_window < 1)
    throw Error(ErrorCode::InvalidArgument, "feature_window must be >= 1");
  if (c->train_fraction <= 0 || c->train_fraction >= 1)
    throw Error(ErrorCode::InvalidArgument, "train_fraction outside (0, 1)");
  if (c->max_train_points < 2)
    throw Error(ErrorCode::InvalidArgument, "max_train_points must be >= 2");
  if (c->merge_gap_s < 0)
    throw Error(ErrorCode::InvalidArgument, "merge_gap_s must be >= 0");
}

}  // namespace

std::string config_to_json(const ToolConfig &config) {
  json j{{"frontend", frontend_to_json(config.frontend)},
         {"mel", mel_to_json(config.mel)},
         {"pattern", pattern_to_json(config.pattern)},
         {"lpc", lpc_to_json(config.lpc)},
         {"svm", svm_to_json(config.svm)}};
  return j.dump(2) + "\n";
}

ToolConfig config_from_json(const std::string &json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::CorruptFile,
                std::string("config parse failure: ") + e.what());
  }
  check_keys(j, {"frontend", "mel", "pattern", "lpc", "svm"}, "config");
  ToolConfig cfg;
  try {
    if (j.contains("frontend")) frontend_from_json(j["frontend"], &cfg.frontend);
    if (j.contains("mel")) mel_from_json(j["mel"], &cfg.mel);
    if (j.contains("pattern")) pattern_from_json(j["pattern"], &cfg.pattern);
    if (j.contains("lpc")) lpc_from_json(j["lpc"], &cfg.lpc);
    if (j.contains("svm")) svm_from_json(j["svm"], &cfg.svm);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::InvalidArgument,
                std::string("config value failure: ") + e.what());
  }
  if (cfg.mel.fmax_hz > cfg.frontend.sample_rate / 2.0)
    throw Error(ErrorCode::InvalidArgument,
                "fmax_hz exceeds the Nyquist frequency");
  return cfg;
}

ToolConfig load_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::CorruptFile, "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

void save_config_file(const ToolConfig &config, const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::CorruptFile, "cannot write config file " + path);
  out << config_to_json(config);
}

std::string frontend_fingerprint(const FrameConfig &fcfg,
                                 const MelConfig &mcfg) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "rate=%d;frame_ms=%g;step_ms=%g;alpha=%g;window=%s;"
                "filters=%d;coeffs=%d;fft=%d;fmin=%g;fmax=%g;lifter=%g",
                fcfg.sample_rate, fcfg.frame_ms, fcfg.step_ms,
                fcfg.preemphasis, window_kind_name(fcfg.window),
                mcfg.num_filters, mcfg.num_coeffs, mcfg.fft_size, mcfg.fmin_hz,
                mcfg.fmax_hz, mcfg.lifter);
  return buf;
}

}  // namespace breathdet

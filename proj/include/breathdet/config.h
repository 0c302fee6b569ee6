// include/breathdet/config.h

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

#ifndef BREATHDET_CONFIG_H_
#define BREATHDET_CONFIG_H_

#include <cstdint>
#include <string>

namespace breathdet {

enum class WindowKind { hamming, half_hamming, rectangular };

const char *window_kind_name(WindowKind kind);
WindowKind window_kind_from_name(const std::string &name);

// Framing and pre-emphasis. 15 ms frames advanced by 10 ms share 5 ms of
// signal between neighbours.
struct FrameConfig {
  int sample_rate = 16000;
  double frame_ms = 15.0;
  double step_ms = 10.0;
  double preemphasis = 0.97;
  WindowKind window = WindowKind::half_hamming;

  int frame_len() const;
  int frame_step() const;
};

struct MelConfig {
  int num_filters = 26;
  int num_coeffs = 13;
  int fft_size = 512;
  double fmin_hz = 50.0;
  double fmax_hz = 8000.0;
  double lifter = 22.0;
};

struct PatternConfig {
  double threshold = 0.25;
  int min_frames = 10;
  bool normalize = true;
  int target_subframes = 30;
};

struct LpcConfig {
  int order = 10;
  double gain_threshold = 0.9;
  double min_dur_s = 0.2;
  double max_dur_s = 60.0;
  double beta = 0.05;
  double min_power_fraction = 0.25;
  bool adapt = false;
};

struct SvmConfig {
  double gamma = 1e-2;
  int feature_window = 15;
  double train_fraction = 0.7;
  std::uint32_t seed = 7;
  int max_train_points = 2000;
  // Classification dips this short inside a run are closed before the
  // duration veto: a one-frame wobble is not a breath boundary. Kept well
  // under the inter-blip spacing of spurious positives so isolated blips
  // never chain into a phantom event.
  double merge_gap_s = 0.03;
};

struct ToolConfig {
  FrameConfig frontend;
  MelConfig mel;
  PatternConfig pattern;
  LpcConfig lpc;
  SvmConfig svm;
};

// JSON (de)serialization. Loading rejects unknown keys so a typo in a
// config file cannot silently fall back to a default.
std::string config_to_json(const ToolConfig &config);
ToolConfig config_from_json(const std::string &json_text);
ToolConfig load_config_file(const std::string &path);
void save_config_file(const ToolConfig &config, const std::string &path);

// Frontend fingerprint: the FrameConfig+MelConfig subset a stored model is
// only valid under. Compared verbatim on load.
std::string frontend_fingerprint(const FrameConfig &fcfg, const MelConfig &mcfg);

}  // namespace breathdet

#endif  // BREATHDET_CONFIG_H_

// include/breathdet/synth.h

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

#ifndef BREATHDET_SYNTH_H_
#define BREATHDET_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "breathdet/audio.h"

namespace breathdet {

// Deterministic generator independent of library distribution internals:
// uniforms come from explicit 32-bit draws, normals from Box-Muller.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
  double uniform();  // [0, 1)
  double gauss();    // standard normal

 private:
  std::uint64_t next_u64();
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// One scripted segment. Unused fields keep their defaults; generators read
// only the fields that apply to their kind.
struct SceneSegment {
  std::string kind;  // inhale | exhale_pause | speech_proxy | silence | alarm_overlay
  double start_s = 0.0;
  double duration_s = 0.0;
  double level = 0.1;  // target RMS
  // Inhalation shaping (design decision: exposed so bench conditions other
  // than the defaults can be scripted without code changes).
  double band_lo_hz = 300.0;
  double band_hi_hz = 3000.0;
  double res_hz = 1100.0;
  double res_q = 2.0;
  double res_mix = 2.0;
  double attack_ms = 30.0;
  double click_level = 1.5;  // relative to level; <= 0 disables clicks
  // When > 0: render onset_trim_s + duration_s + 0.1 seconds of inhalation
  // and keep [onset_trim_s, onset_trim_s + duration_s), i.e. a steady-state
  // cut that excludes the attack.
  double onset_trim_s = 0.0;
};

struct SceneScript {
  double duration_s = 0.0;
  int sample_rate = 16000;
  std::uint64_t seed = 0;
  std::vector<SceneSegment> segments;
};

struct GroundTruth {
  std::vector<double> starts;  // inhalation start seconds
  std::vector<double> ends;
};

struct RenderedScene {
  AudioBuffer audio;
  GroundTruth truth;
  double scale = 1.0;  // post-mix safety scale applied to keep peak <= 1
};

// Segment generators. Each returns exactly round(dur * rate) samples.
std::vector<double> gen_inhale(const SceneSegment &seg, int rate, Rng *rng);
std::vector<double> gen_exhale(const SceneSegment &seg, int rate, Rng *rng);
std::vector<double> gen_speech_proxy(const SceneSegment &seg, int rate,
                                     Rng *rng);
std::vector<double> gen_alarm(const SceneSegment &seg, int rate, Rng *rng);

// Mix all segments into one buffer. Non-overlay segments may not overlap
// in time (OverlapError); alarm_overlay is additive and may cover anything.
// Per-segment RNG seed is scene seed * 1000003 + segment index, so editing
// one segment does not disturb the others.
RenderedScene render_scene(const SceneScript &script);

SceneScript load_scene_script(const std::string &path);
void save_ground_truth(const std::string &path, const GroundTruth &truth);
GroundTruth load_ground_truth(const std::string &path);

}  // namespace breathdet

#endif  // BREATHDET_SYNTH_H_

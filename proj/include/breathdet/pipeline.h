// include/breathdet/pipeline.h

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

#ifndef BREATHDET_PIPELINE_H_
#define BREATHDET_PIPELINE_H_

#include <cstddef>
#include <string>
#include <vector>

#include "breathdet/audio.h"
#include "breathdet/breath_template.h"
#include "breathdet/config.h"
#include "breathdet/events.h"
#include "breathdet/lpc.h"
#include "breathdet/svm.h"
#include "breathdet/synth.h"
#include "breathdet/types.h"

namespace breathdet {

// Events plus the per-position score trace they were cut from.
struct DetectResult {
  std::vector<BreathEvent> events;
  std::vector<double> index_times;
  std::vector<double> index_values;
};

DetectResult run_pattern_detect(const AudioBuffer &buf,
                                const BreathTemplate &tmpl,
                                const ToolConfig &cfg,
                                Exec exec = Exec::serial);
DetectResult run_lpc_detect(const AudioBuffer &buf, const LpcModel &model,
                            const ToolConfig &cfg);
DetectResult run_svm_detect(const AudioBuffer &buf, const LpcModel &model,
                            const SvmModel &svm, const ToolConfig &cfg);

// Fit the all-pole inhalation model from exemplar recordings: frames from
// every exemplar pool into one autocorrelation average.
LpcModel fit_lpc_from_exemplars(const std::vector<AudioBuffer> &exemplars,
                                const ToolConfig &cfg);

// Train the gain-window classifier from a recording with known inhalation
// intervals. Standardization statistics come from the retained train split.
// When verify_counts is given it receives held-out split performance.
SvmModel train_svm_from_scene(const AudioBuffer &buf,
                              const GroundTruth &truth,
                              const LpcModel &model, const ToolConfig &cfg,
                              EvalCounts *verify_counts = nullptr);

// Same trainer fed a precomputed gain track instead of audio.
SvmModel train_svm_from_gains(const GainSeries &series,
                              const GroundTruth &truth,
                              const ToolConfig &cfg,
                              EvalCounts *verify_counts = nullptr);

// Greedy nearest-start matching between detected and reference events.
// Detections pair with the unclaimed reference whose start is closest and
// within tolerance_s; everything else is a miss or a false alarm.
struct EventMatch {
  std::size_t detected_idx = 0;
  std::size_t reference_idx = 0;
  double start_error_s = 0.0;     // absolute
  double duration_error_s = 0.0;  // absolute
};
struct CompareResult {
  std::vector<EventMatch> matches;
  std::vector<std::size_t> missed_refs;
  std::vector<std::size_t> false_alarms;
  double recall() const;
  double precision() const;
};
CompareResult compare_events(const std::vector<BreathEvent> &detected,
                             const std::vector<BreathEvent> &reference,
                             double tolerance_s);

}  // namespace breathdet

#endif  // BREATHDET_PIPELINE_H_

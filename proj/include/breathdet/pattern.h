// include/breathdet/pattern.h

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

#ifndef BREATHDET_PATTERN_H_
#define BREATHDET_PATTERN_H_

#include <cstddef>
#include <vector>

#include "breathdet/breath_template.h"
#include "breathdet/cepstral.h"
#include "breathdet/events.h"
#include "breathdet/types.h"

namespace breathdet {

// Breath similarity B per sliding-window position (stride one column).
struct IndexSeries {
  std::vector<double> values;
  std::vector<double> times;  // window start seconds
  bool normalized = false;
  double threshold_used = 0.0;
  double window_span_s = 0.0;  // template width in seconds (end correction)
};

// D = (window_dc_removed - T) / V elementwise, each column then liftered
// with a half-Hamming window over the coefficient index.
Matrix normalized_difference(const Matrix &window, const BreathTemplate &t);

// C_p = 1 / max(sum D^2, eps); larger = more similar.
double similarity_cp(const Matrix &d);

// C_n = 1 / max(|sum_j s1 . D_j|, eps).
double similarity_cn(const Matrix &d, const std::vector<double> &s1);

// One B = C_p * C_n per window position; optionally normalized by the max.
IndexSeries breath_index_track(const Cepstrogram &c, const BreathTemplate &t,
                               bool normalize, Exec exec = Exec::serial);

// Strictly-greater-than-both-neighbours local maxima; endpoints excluded.
std::vector<std::size_t> find_peaks(const std::vector<double> &series);

// Maximal runs of values >= threshold lasting at least min_frames become
// events; the window span is added to the run end (a window starting at
// the run's last position still covers span seconds of signal).
std::vector<BreathEvent> detect_events_pattern(const IndexSeries &series,
                                               double threshold,
                                               int min_frames);

}  // namespace breathdet

#endif  // BREATHDET_PATTERN_H_

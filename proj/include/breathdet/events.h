// include/breathdet/events.h

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

#ifndef BREATHDET_EVENTS_H_
#define BREATHDET_EVENTS_H_

#include <cstddef>
#include <string>
#include <vector>

namespace breathdet {

struct BreathEvent {
  double start_s = 0.0;
  double end_s = 0.0;
  double duration_s = 0.0;
  double peak_value = 0.0;
  std::string detector;  // "pattern", "lpc", or "lpc_svm"
};

struct RateEntry {
  double event_time_s = 0.0;
  double rate_bpm = 0.0;
  bool flagged = false;  // outside the physiological band
};

// rate_i = 60 / (start_i - start_{i-1}); the first event has no rate.
// Throws NonMonotonic when starts are not strictly increasing.
std::vector<RateEntry> breathing_rates(const std::vector<BreathEvent> &events);

// Flags (never deletes) entries outside [min_bpm, max_bpm].
void screen_outliers(std::vector<RateEntry> *rates, double min_bpm = 4.0,
                     double max_bpm = 60.0);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

// Fixed-width bins covering [lo, hi); values at or beyond hi land in the
// last bin (overflow clamp), values below lo in the first.
std::vector<HistogramBin> fixed_histogram(const std::vector<double> &values,
                                          double lo, double hi,
                                          double bin_width);

// CSV emit/parse. Columns are pinned; floats printed with %.6f so repeated
// runs byte-match.
void write_events_csv(const std::vector<BreathEvent> &events,
                      const std::string &path);
std::vector<BreathEvent> read_events_csv(const std::string &path);
void write_rates_csv(const std::vector<RateEntry> &rates,
                     const std::string &path);
void write_durations_csv(const std::vector<BreathEvent> &events,
                         const std::string &path);
void write_hist_csv(const std::vector<HistogramBin> &bins,
                    const std::string &path);
void write_index_csv(const std::vector<double> &times,
                     const std::vector<double> &scores,
                     const std::string &path);

}  // namespace breathdet

#endif  // BREATHDET_EVENTS_H_

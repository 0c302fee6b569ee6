// src/event_screen.h

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

// Internal helpers shared by the gain-only and classifier detectors.

#ifndef BREATHDET_SRC_EVENT_SCREEN_H_
#define BREATHDET_SRC_EVENT_SCREEN_H_

#include <cstddef>
#include <string>
#include <vector>

#include "breathdet/config.h"
#include "breathdet/events.h"

namespace breathdet {
namespace internal {

struct Run {
  std::size_t first = 0;
  std::size_t last = 0;
};

// Maximal runs of true entries.
std::vector<Run> mask_runs(const std::vector<char> &mask);

// Duration vetoes, then a causal low-power screen: a candidate must reach
// min_power_fraction of the median power over frames of previously accepted
// events (history capped at 300 frames). The first candidate has no history
// and passes the screen unconditionally.
std::vector<BreathEvent> screen_runs_to_events(
    const std::vector<Run> &runs, const std::vector<double> &times,
    const std::vector<double> &powers, const std::vector<double> &scores,
    double span_s, const LpcConfig &lcfg, bool score_is_min,
    const std::string &detector);

}  // namespace internal
}  // namespace breathdet

#endif  // BREATHDET_SRC_EVENT_SCREEN_H_

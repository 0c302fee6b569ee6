// include/breathdet/frontend.h

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

#ifndef BREATHDET_FRONTEND_H_
#define BREATHDET_FRONTEND_H_

#include <vector>

#include "breathdet/audio.h"
#include "breathdet/config.h"

namespace breathdet {

// y[0] = x[0]; y[n] = x[n] - alpha * x[n-1].
std::vector<double> preemphasize(const std::vector<double> &x, double alpha);

// Window weights of the given kind. The half-Hamming window is flat over
// the first half (w[n] = 1 for n < len/2) and Hamming-tapered after.
std::vector<double> make_window(WindowKind kind, int len);

// Pre-emphasized, stepped, windowed frames. frames[i] covers samples
// [i*step, i*step + frame_len); times[i] = i*step / rate.
struct FrameSet {
  std::vector<std::vector<double>> frames;
  std::vector<double> times;
  int frame_len = 0;
  int frame_step = 0;
};

FrameSet make_frames(const AudioBuffer &buf, const FrameConfig &cfg);

}  // namespace breathdet

#endif  // BREATHDET_FRONTEND_H_

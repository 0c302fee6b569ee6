// src/frontend.cc

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

#include "breathdet/frontend.h"

#include <cmath>

#include "breathdet/error.h"

namespace breathdet {

std::vector<double> preemphasize(const std::vector<double> &x, double alpha) {
  std::vector<double> y(x.size());
  if (x.empty()) return y;
  y[0] = x[0];
  for (std::size_t n = 1; n < x.size(); ++n) y[n] = x[n] - alpha * x[n - 1];
  return y;
}

std::vector<double> make_window(WindowKind kind, int len) {
  if (len < 2)
    throw Error(ErrorCode::InvalidArgument, "window length must be >= 2");
  std::vector<double> w(static_cast<std::size_t>(len), 1.0);
  if (kind == WindowKind::rectangular) return w;
  for (int n = 0; n < len; ++n) {
    const double h = 0.54 - 0.46 * std::cos(2.0 * M_PI * n / (len - 1));
    // Half-Hamming: flat weighting over the leading (low-index) half.
    if (kind == WindowKind::hamming || n >= len / 2.0) w[n] = h;
  }
  return w;
}

FrameSet make_frames(const AudioBuffer &buf, const FrameConfig &cfg) {
  const int fl = cfg.frame_len();
  const int st = cfg.frame_step();
  if (static_cast<int>(buf.samples.size()) < fl)
    throw Error(ErrorCode::TooShort, "signal shorter than one frame");

  const std::vector<double> y = preemphasize(buf.samples, cfg.preemphasis);
  const std::vector<double> w = make_window(cfg.window, fl);
  const std::size_t nf = (y.size() - fl) / st + 1;

  FrameSet set;
  set.frame_len = fl;
  set.frame_step = st;
  set.frames.resize(nf);
  set.times.resize(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    std::vector<double> frame(fl);
    const std::size_t base = i * st;
    for (int j = 0; j < fl; ++j) frame[j] = y[base + j] * w[j];
    set.frames[i] = std::move(frame);
    set.times[i] = static_cast<double>(base) / cfg.sample_rate;
  }
  return set;
}

}  // namespace breathdet

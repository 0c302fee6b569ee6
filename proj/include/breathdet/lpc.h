// include/breathdet/lpc.h

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

#ifndef BREATHDET_LPC_H_
#define BREATHDET_LPC_H_

#include <cstddef>
#include <string>
#include <vector>

#include "breathdet/audio.h"
#include "breathdet/config.h"
#include "breathdet/events.h"

namespace breathdet {

// All-pole model of a prototype inhalation plus the autocorrelation it was
// fit from (kept so the model can be re-fit after adaptation).
struct LpcModel {
  std::vector<double> coeffs;  // a_1..a_order, prediction convention
  double gain = 0.0;           // sqrt(R[0] - sum a_k R[k])
  int order = 0;
  std::vector<double> source_autocorrelation;  // R[0..order]
};

// Per-frame inverse-filter gain over an input recording.
struct GainSeries {
  std::vector<double> gains;   // residual power / frame power
  std::vector<double> powers;  // mean power per sample of the filter input
  std::vector<double> times;   // frame start seconds
  double step_s = 0.0;
  double frame_len_s = 0.0;  // span of one frame (event end correction)
};

// Biased estimate: R[k] = (1/len) sum_n x[n] x[n+k], k = 0..order.
std::vector<double> autocorrelation(const std::vector<double> &x, int order);

// Levinson-Durbin on R[0..order]. Throws SingularSystem when R[0] is not
// usable or a reflection step degenerates.
LpcModel solve_lpc(const std::vector<double> &r, int order);

// FIR whitener e[n] = x[n] - sum_k a_k x[n-k], zero initial history.
std::vector<double> inverse_filter(const std::vector<double> &x,
                                   const LpcModel &model);

// G = sum e^2 / sum y^2 for one frame pair; throws SilentFrame on zero power.
double frame_gain(const std::vector<double> &residual_frame,
                  const std::vector<double> &signal_frame);

// Pre-emphasize, filter the whole signal once, then cut rectangular frames
// from both the filtered and unfiltered streams and take the power ratio.
GainSeries gain_track(const AudioBuffer &buf, const LpcModel &model,
                      const FrameConfig &fcfg, const LpcConfig &lcfg);

// R <- (1 - beta) R + beta R_frame. Callers gate on matched frames.
void adapt_autocorrelation(std::vector<double> *r,
                           const std::vector<double> &r_frame, double beta);

// Frames match when G <= gain_threshold and frame power clears a fraction
// of the causal rolling median power of previously matched frames. Runs of
// matches become events, subject to the duration vetoes.
std::vector<BreathEvent> detect_events_lpc(const GainSeries &series,
                                           const LpcConfig &lcfg);

// lpc1 container round trip.
void save_lpc_model(const std::string &path, const LpcModel &model);
LpcModel load_lpc_model(const std::string &path);

}  // namespace breathdet

#endif  // BREATHDET_LPC_H_

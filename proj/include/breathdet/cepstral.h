// include/breathdet/cepstral.h

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

#ifndef BREATHDET_CEPSTRAL_H_
#define BREATHDET_CEPSTRAL_H_

#include <cstddef>
#include <string>
#include <vector>

#include "breathdet/audio.h"
#include "breathdet/config.h"
#include "breathdet/types.h"

namespace breathdet {

// Mel scale: M(f) = 1125 ln(1 + f/700). hz_to_mel(1000) ~ 998.2.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filterbank over periodogram bins 0..fft_size/2. Rows are
// filters with unit peak; num_filters+2 corner points equally spaced in
// mel between fmin and fmax, snapped to the FFT bin grid.
Matrix mel_filterbank(const MelConfig &cfg, int sample_rate);

// Cepstral lifter weights for coefficients 1..num_coeffs:
// 1 + (L/2) sin(pi n / L).
std::vector<double> cepstral_lifter(const MelConfig &cfg);

// Liftered MFCC columns over frames: matrix is num_coeffs x num_frames,
// times[j] is the start of frame j.
struct Cepstrogram {
  Matrix m;
  std::vector<double> times;
  double step_s = 0.0;
};

Cepstrogram compute_cepstrogram(const AudioBuffer &buf,
                                const FrameConfig &fcfg, const MelConfig &mcfg,
                                Exec exec = Exec::serial);

// MFCCs of a single windowed frame (helper shared with the cepstrogram).
std::vector<double> frame_mfcc(const std::vector<double> &windowed_frame,
                               const Matrix &bank,
                               const std::vector<double> &lifter,
                               const MelConfig &cfg);

// Real cepstrum: inverse transform of the log magnitude spectrum
// (magnitude floored before the log). Output length = fft_size.
std::vector<double> real_cepstrum(const std::vector<double> &frame,
                                  std::size_t fft_size);

// Debug export, rows = coefficients, columns = frames.
void write_cepstrogram_csv(const Cepstrogram &c, const std::string &path);

}  // namespace breathdet

#endif  // BREATHDET_CEPSTRAL_H_

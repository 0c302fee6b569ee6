// include/breathdet/audio.h

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

#ifndef BREATHDET_AUDIO_H_
#define BREATHDET_AUDIO_H_

#include <string>
#include <vector>

namespace breathdet {

// Mono floating-point signal. Samples live in [-1, +1] after decoding.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration_s() const {
    return sample_rate > 0
               ? static_cast<double>(samples.size()) / sample_rate
               : 0.0;
  }
};

// RIFF/WAVE reader. PCM 16-bit and IEEE float 32-bit, 1 or 2 channels;
// stereo is averaged to mono; integer samples are scaled by 1/32768.
AudioBuffer load_wav(const std::string &path);

// PCM16 writer (values clipped to [-1, 1) then scaled by 32768).
void save_wav_pcm16(const AudioBuffer &buf, const std::string &path);

// Linear-phase windowed-sinc resampler (Hann window, 32 zero crossings).
// Output length = round(len * target / source); identity when rates match.
AudioBuffer resample(const AudioBuffer &buf, int target_rate);

// Scale so the largest |sample| becomes `peak` (no-op on silence).
void peak_normalize(AudioBuffer *buf, double peak = 0.99);

}  // namespace breathdet

#endif  // BREATHDET_AUDIO_H_

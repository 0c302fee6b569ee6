// include/breathdet/fft.h

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

#ifndef BREATHDET_FFT_H_
#define BREATHDET_FFT_H_

#include <complex>
#include <cstddef>
#include <vector>

namespace breathdet {

// In-place iterative radix-2 complex FFT. Size must be a power of two.
void fft_inplace(std::vector<std::complex<double>> *x, bool inverse = false);

// Real-input DFT of the first fft_size samples of `frame` (zero padded if
// shorter). Returns bins 0..fft_size/2 inclusive.
std::vector<std::complex<double>> rfft(const std::vector<double> &frame,
                                       std::size_t fft_size);

// Periodogram estimate P[k] = |X[k]|^2 / fft_size over bins 0..fft_size/2.
std::vector<double> periodogram(const std::vector<double> &frame,
                                std::size_t fft_size);

}  // namespace breathdet

#endif  // BREATHDET_FFT_H_

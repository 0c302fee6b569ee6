// src/fft.cc

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

#include "breathdet/fft.h"

#include <cmath>

#include "breathdet/error.h"

namespace breathdet {

void fft_inplace(std::vector<std::complex<double>> *x, bool inverse) {
  auto &a = *x;
  const std::size_t n = a.size();
  if (n == 0) return;
  if ((n & (n - 1)) != 0)
    throw Error(ErrorCode::InvalidArgument, "FFT size must be a power of two");

  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto &v : a) v *= inv;
  }
}

std::vector<std::complex<double>> rfft(const std::vector<double> &frame,
                                       std::size_t fft_size) {
  if (frame.size() > fft_size)
    throw Error(ErrorCode::InvalidArgument, "frame longer than FFT size");
  std::vector<std::complex<double>> x(fft_size, {0.0, 0.0});
  for (std::size_t i = 0; i < frame.size(); ++i) x[i] = frame[i];
  fft_inplace(&x, false);
  x.resize(fft_size / 2 + 1);
  return x;
}

std::vector<double> periodogram(const std::vector<double> &frame,
                                std::size_t fft_size) {
  const auto spectrum = rfft(frame, fft_size);
  std::vector<double> p(spectrum.size());
  const double inv_n = 1.0 / static_cast<double>(fft_size);
  for (std::size_t k = 0; k < spectrum.size(); ++k)
    p[k] = std::norm(spectrum[k]) * inv_n;
  return p;
}

}  // namespace breathdet

// src/cepstral.cc

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

#include "breathdet/cepstral.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "breathdet/error.h"
#include "breathdet/fft.h"
#include "breathdet/frontend.h"

namespace breathdet {

namespace {
constexpr double kLogFloor = 1e-10;   // filterbank energy floor before ln
constexpr double kMagFloor = 1e-10;   // magnitude floor for the real cepstrum
}  // namespace

double hz_to_mel(double hz) { return 1125.0 * std::log(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::exp(mel / 1125.0) - 1.0); }

Matrix mel_filterbank(const MelConfig &cfg, int sample_rate) {
  if (cfg.fmax_hz > sample_rate / 2.0)
    throw Error(ErrorCode::InvalidArgument, "fmax_hz above Nyquist");
  const int nbins = cfg.fft_size / 2 + 1;
  const double mel_lo = hz_to_mel(cfg.fmin_hz);
  const double mel_hi = hz_to_mel(cfg.fmax_hz);

  std::vector<int> bins(cfg.num_filters + 2);
  for (int m = 0; m < cfg.num_filters + 2; ++m) {
    const double mel =
        mel_lo + (mel_hi - mel_lo) * m / (cfg.num_filters + 1);
    const double hz = mel_to_hz(mel);
    bins[m] = static_cast<int>(std::lround(hz * cfg.fft_size / sample_rate));
  }
  for (int m = 1; m < cfg.num_filters + 2; ++m)
    if (bins[m] == bins[m - 1])
      throw Error(ErrorCode::DegenerateBank,
                  "adjacent mel points snap to the same FFT bin");

  Matrix bank(cfg.num_filters, nbins, 0.0);
  for (int m = 1; m <= cfg.num_filters; ++m) {
    const int l = bins[m - 1], c = bins[m], r = bins[m + 1];
    for (int k = l; k <= c; ++k)
      if (c > l) bank(m - 1, k) = static_cast<double>(k - l) / (c - l);
    for (int k = c; k <= r; ++k)
      if (r > c) bank(m - 1, k) = static_cast<double>(r - k) / (r - c);
  }
  return bank;
}

std::vector<double> cepstral_lifter(const MelConfig &cfg) {
  std::vector<double> lift(cfg.num_coeffs);
  for (int n = 1; n <= cfg.num_coeffs; ++n)
    lift[n - 1] =
        1.0 + (cfg.lifter / 2.0) * std::sin(M_PI * n / cfg.lifter);
  return lift;
}

std::vector<double> frame_mfcc(const std::vector<double> &windowed_frame,
                               const Matrix &bank,
                               const std::vector<double> &lifter,
                               const MelConfig &cfg) {
  const std::vector<double> p = periodogram(windowed_frame, cfg.fft_size);
  if (bank.cols != p.size())
    throw Error(ErrorCode::DimensionMismatch,
                "filterbank width does not match the spectrum");

  std::vector<double> log_e(cfg.num_filters);
  for (int j = 0; j < cfg.num_filters; ++j) {
    double e = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) e += bank(j, k) * p[k];
    log_e[j] = std::log(std::max(e, kLogFloor));
  }

  std::vector<double> c(cfg.num_coeffs);
  const double scale = std::sqrt(2.0 / cfg.num_filters);
  for (int i = 1; i <= cfg.num_coeffs; ++i) {
    double acc = 0.0;
    for (int j = 1; j <= cfg.num_filters; ++j)
      acc += log_e[j - 1] * std::cos(M_PI * i * (j - 0.5) / cfg.num_filters);
    c[i - 1] = scale * acc * lifter[i - 1];
  }
  return c;
}

Cepstrogram compute_cepstrogram(const AudioBuffer &buf,
                                const FrameConfig &fcfg, const MelConfig &mcfg,
                                Exec exec) {
  const FrameSet frames = make_frames(buf, fcfg);
  const Matrix bank = mel_filterbank(mcfg, fcfg.sample_rate);
  const std::vector<double> lifter = cepstral_lifter(mcfg);

  Cepstrogram out;
  out.times = frames.times;
  out.step_s = static_cast<double>(frames.frame_step) / fcfg.sample_rate;
  out.m = Matrix(mcfg.num_coeffs, frames.frames.size());

  const std::ptrdiff_t nf = static_cast<std::ptrdiff_t>(frames.frames.size());
  // Columns are independent; identical arithmetic per column in both modes.
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < nf; ++i) {
      const auto c = frame_mfcc(frames.frames[i], bank, lifter, mcfg);
      for (int r = 0; r < mcfg.num_coeffs; ++r) out.m(r, i) = c[r];
    }
  } else {
    for (std::ptrdiff_t i = 0; i < nf; ++i) {
      const auto c = frame_mfcc(frames.frames[i], bank, lifter, mcfg);
      for (int r = 0; r < mcfg.num_coeffs; ++r) out.m(r, i) = c[r];
    }
  }
  return out;
}

std::vector<double> real_cepstrum(const std::vector<double> &frame,
                                  std::size_t fft_size) {
  if (frame.size() > fft_size)
    throw Error(ErrorCode::InvalidArgument, "frame longer than FFT size");
  std::vector<std::complex<double>> x(fft_size, {0.0, 0.0});
  for (std::size_t i = 0; i < frame.size(); ++i) x[i] = frame[i];
  fft_inplace(&x, false);
  for (auto &v : x) v = std::log(std::max(std::abs(v), kMagFloor));
  fft_inplace(&x, true);
  std::vector<double> c(fft_size);
  for (std::size_t i = 0; i < fft_size; ++i) c[i] = x[i].real();
  return c;
}

void write_cepstrogram_csv(const Cepstrogram &c, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::CorruptFile, "cannot write " + path);
  char buf[64];
  for (std::size_t r = 0; r < c.m.rows; ++r) {
    for (std::size_t j = 0; j < c.m.cols; ++j) {
      std::snprintf(buf, sizeof(buf), "%.6f", c.m(r, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

}  // namespace breathdet

// src/pattern.cc

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

#include "breathdet/pattern.h"

#include <algorithm>
#include <cmath>

#include "breathdet/error.h"
#include "breathdet/frontend.h"

namespace breathdet {

namespace {
constexpr double kEps = 1e-9;  // keeps both similarity inverses finite

// One window position: slice, difference, C_p * C_n. Composes the public
// operations so the track equals their product exactly.
double score_at(const Cepstrogram &c, std::size_t pos,
                const BreathTemplate &t) {
  Matrix window(t.mean.rows, t.mean.cols);
  for (std::size_t r = 0; r < window.rows; ++r)
    for (std::size_t j = 0; j < window.cols; ++j)
      window(r, j) = c.m(r, pos + j);
  const Matrix d = normalized_difference(window, t);
  return similarity_cp(d) * similarity_cn(d, t.singular);
}

}  // namespace

Matrix normalized_difference(const Matrix &window, const BreathTemplate &t) {
  if (!window.same_shape(t.mean))
    throw Error(ErrorCode::ShapeMismatch,
                "window shape does not match the template");
  const Matrix x = remove_column_dc(window);
  const std::vector<double> lift =
      make_window(WindowKind::half_hamming, static_cast<int>(window.rows));
  Matrix d(window.rows, window.cols);
  for (std::size_t r = 0; r < window.rows; ++r)
    for (std::size_t c = 0; c < window.cols; ++c)
      d(r, c) = (x(r, c) - t.mean(r, c)) / t.variance(r, c) * lift[r];
  return d;
}

double similarity_cp(const Matrix &d) {
  double acc = 0.0;
  for (double v : d.data) acc += v * v;
  return 1.0 / std::max(acc, kEps);
}

double similarity_cn(const Matrix &d, const std::vector<double> &s1) {
  if (s1.size() != d.rows)
    throw Error(ErrorCode::DimensionMismatch,
                "singular vector length does not match rows");
  double proj = 0.0;
  for (std::size_t c = 0; c < d.cols; ++c)
    for (std::size_t r = 0; r < d.rows; ++r) proj += s1[r] * d(r, c);
  return 1.0 / std::max(std::abs(proj), kEps);
}

IndexSeries breath_index_track(const Cepstrogram &c, const BreathTemplate &t,
                               bool normalize, Exec exec) {
  if (t.mean.rows != c.m.rows)
    throw Error(ErrorCode::ShapeMismatch,
                "template coefficient count differs from the cepstrogram");
  if (c.m.cols < t.mean.cols)
    throw Error(ErrorCode::TooShort, "cepstrogram narrower than the template");
  const std::size_t n = c.m.cols - t.mean.cols + 1;

  IndexSeries series;
  series.values.resize(n);
  series.times.assign(c.times.begin(), c.times.begin() + n);
  series.window_span_s = static_cast<double>(t.mean.cols) * c.step_s;

  const std::ptrdiff_t np = static_cast<std::ptrdiff_t>(n);
  // Positions are independent; identical arithmetic per position in both
  // modes, so serial and parallel tracks match bitwise.
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < np; ++p)
      series.values[p] = score_at(c, p, t);
  } else {
    for (std::ptrdiff_t p = 0; p < np; ++p)
      series.values[p] = score_at(c, p, t);
  }

  if (normalize) {
    double mx = 0.0;
    for (double v : series.values) mx = std::max(mx, v);
    if (mx > 0.0)
      for (double &v : series.values) v /= mx;
    series.normalized = true;
  }
  return series;
}

std::vector<std::size_t> find_peaks(const std::vector<double> &series) {
  std::vector<std::size_t> peaks;
  if (series.size() < 3) return peaks;
  for (std::size_t i = 1; i + 1 < series.size(); ++i)
    if (series[i - 1] < series[i] && series[i] > series[i + 1])
      peaks.push_back(i);
  return peaks;
}

std::vector<BreathEvent> detect_events_pattern(const IndexSeries &series,
                                               double threshold,
                                               int min_frames) {
  if (threshold <= 0)
    throw Error(ErrorCode::InvalidArgument, "threshold must be positive");
  if (min_frames < 1)
    throw Error(ErrorCode::InvalidArgument, "min_frames must be >= 1");

  std::vector<BreathEvent> events;
  const std::size_t n = series.values.size();
  std::size_t i = 0;
  while (i < n) {
    if (series.values[i] < threshold) {
      ++i;
      continue;
    }
    std::size_t j = i;
    double peak = series.values[i];
    while (j + 1 < n && series.values[j + 1] >= threshold) {
      ++j;
      peak = std::max(peak, series.values[j]);
    }
    if (j - i + 1 >= static_cast<std::size_t>(min_frames)) {
      BreathEvent ev;
      ev.start_s = series.times[i];
      ev.end_s = series.times[j] + series.window_span_s;
      ev.duration_s = ev.end_s - ev.start_s;
      ev.peak_value = peak;
      ev.detector = "pattern";
      events.push_back(ev);
    }
    i = j + 1;
  }
  return events;
}

}  // namespace breathdet

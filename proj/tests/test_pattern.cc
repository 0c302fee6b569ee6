// tests/test_pattern.cc

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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <vector>

#include "breathdet/breath_template.h"
#include "breathdet/cepstral.h"
#include "breathdet/config.h"
#include "breathdet/error.h"
#include "breathdet/frontend.h"
#include "breathdet/pattern.h"
#include "doctest.h"
#include "oracle.h"

using breathdet::BreathTemplate;
using breathdet::Cepstrogram;
using breathdet::Error;
using breathdet::IndexSeries;
using breathdet::Matrix;

namespace {

// Hand-built template: zero-mean columns in T, strictly positive V, unit s1.
BreathTemplate toy_template(std::size_t rows, std::size_t cols,
                            std::uint64_t seed) {
  oracle::TestRng rng(seed);
  BreathTemplate t;
  t.mean = Matrix(rows, cols);
  t.variance = Matrix(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      t.mean(r, c) = rng.sym();
      mean += t.mean(r, c);
    }
    mean /= static_cast<double>(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      t.mean(r, c) -= mean;
      t.variance(r, c) = 0.5 + rng.uniform();
    }
  }
  t.singular.assign(rows, 0.0);
  double norm = 0.0;
  for (double &v : t.singular) {
    v = rng.gauss();
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (double &v : t.singular) v /= norm;
  t.n_exemplars = 2;
  return t;
}

Cepstrogram toy_cepstrogram(std::size_t rows, std::size_t cols,
                            std::uint64_t seed) {
  oracle::TestRng rng(seed);
  Cepstrogram c;
  c.m = Matrix(rows, cols);
  for (double &v : c.m.data) v = rng.sym();
  c.times.resize(cols);
  c.step_s = 0.01;
  for (std::size_t j = 0; j < cols; ++j)
    c.times[j] = 0.01 * static_cast<double>(j);
  return c;
}

IndexSeries series_from(const std::vector<double> &values) {
  IndexSeries s;
  s.values = values;
  s.times.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    s.times[i] = 0.01 * static_cast<double>(i);
  s.normalized = true;
  s.window_span_s = 0.3;
  return s;
}

}  // namespace

TEST_CASE("difference of the template with itself is zero") {
  const BreathTemplate t = toy_template(13, 10, 3);
  const Matrix d = breathdet::normalized_difference(t.mean, t);
  for (double v : d.data) CHECK(std::fabs(v) < 1e-12);
}

TEST_CASE("normalized difference matches a scalar-loop oracle") {
  const BreathTemplate t = toy_template(13, 10, 4);
  oracle::TestRng rng(5);
  Matrix window(13, 10);
  for (double &v : window.data) v = rng.sym();

  const Matrix got = breathdet::normalized_difference(window, t);

  const std::vector<double> half =
      breathdet::make_window(breathdet::WindowKind::half_hamming, 13);
  for (std::size_t c = 0; c < window.cols; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < window.rows; ++r) mean += window(r, c);
    mean /= static_cast<double>(window.rows);
    for (std::size_t r = 0; r < window.rows; ++r) {
      const double want =
          (window(r, c) - mean - t.mean(r, c)) / t.variance(r, c) * half[r];
      CHECK(std::fabs(got(r, c) - want) < 1e-12);
    }
  }
}

TEST_CASE("difference requires matching shapes") {
  const BreathTemplate t = toy_template(13, 10, 6);
  CHECK_THROWS_WITH_AS(breathdet::normalized_difference(Matrix(13, 9), t),
                       doctest::Contains("ShapeMismatch"), Error);
}

TEST_CASE("inverse-distance similarity over the whole difference") {
  Matrix ones(5, 4, 1.0);
  CHECK(breathdet::similarity_cp(ones) ==
        doctest::Approx(1.0 / 20.0).epsilon(1e-12));

  CHECK(breathdet::similarity_cp(Matrix(5, 4, 0.0)) ==
        doctest::Approx(1e9).epsilon(1e-12));

  oracle::TestRng rng(7);
  Matrix d(6, 7);
  for (double &v : d.data) v = rng.sym();
  Matrix d2 = d;
  for (double &v : d2.data) v *= 2.0;
  CHECK(breathdet::similarity_cp(d2) ==
        doctest::Approx(breathdet::similarity_cp(d) / 4.0).epsilon(1e-12));
}

TEST_CASE("projection similarity against the singular direction") {
  std::vector<double> s1{1.0, 0.0, 0.0};

  Matrix d(3, 1);
  d(0, 0) = 1.0;
  CHECK(breathdet::similarity_cn(d, s1) == doctest::Approx(1.0).epsilon(1e-12));

  Matrix ortho(3, 4, 0.0);
  for (std::size_t c = 0; c < 4; ++c) ortho(1, c) = 0.7;
  CHECK(breathdet::similarity_cn(ortho, s1) ==
        doctest::Approx(1e9).epsilon(1e-12));

  oracle::TestRng rng(8);
  Matrix r(3, 5);
  for (double &v : r.data) v = rng.sym();
  double acc = 0.0;
  for (std::size_t c = 0; c < r.cols; ++c)
    for (std::size_t row = 0; row < r.rows; ++row)
      acc += s1[row] * r(row, c);
  CHECK(breathdet::similarity_cn(r, s1) ==
        doctest::Approx(1.0 / std::max(std::fabs(acc), 1e-9)).epsilon(1e-12));
}

TEST_CASE("index track length, composition, and normalization") {
  const BreathTemplate t = toy_template(13, 10, 11);
  const Cepstrogram c = toy_cepstrogram(13, 60, 12);

  const IndexSeries raw = breathdet::breath_index_track(c, t, false);
  REQUIRE(raw.values.size() == 51);  // 60 - 10 + 1
  CHECK_FALSE(raw.normalized);
  CHECK(raw.window_span_s == doctest::Approx(0.10).epsilon(1e-12));

  // Each value is exactly the product of the two public similarity scores.
  for (std::size_t pos : {std::size_t{0}, std::size_t{17}, std::size_t{50}}) {
    Matrix window(13, 10);
    for (std::size_t r = 0; r < 13; ++r)
      for (std::size_t j = 0; j < 10; ++j) window(r, j) = c.m(r, pos + j);
    const Matrix d = breathdet::normalized_difference(window, t);
    const double want =
        breathdet::similarity_cp(d) * breathdet::similarity_cn(d, t.singular);
    CHECK(raw.values[pos] == want);
  }

  const IndexSeries norm = breathdet::breath_index_track(c, t, true);
  double peak = 0.0;
  for (double v : norm.values) peak = std::max(peak, v);
  CHECK(peak == 1.0);
  CHECK(norm.normalized);
}

TEST_CASE("planting the template content pins the track maximum") {
  const BreathTemplate t = toy_template(13, 10, 21);
  Cepstrogram c = toy_cepstrogram(13, 80, 22);
  const std::size_t planted = 37;
  for (std::size_t r = 0; r < 13; ++r)
    for (std::size_t j = 0; j < 10; ++j)
      c.m(r, planted + j) = t.mean(r, j);

  const IndexSeries s = breathdet::breath_index_track(c, t, false);
  std::size_t arg = 0;
  for (std::size_t i = 1; i < s.values.size(); ++i)
    if (s.values[i] > s.values[arg]) arg = i;
  CHECK(arg == planted);
}

TEST_CASE("track is invariant to a common positive rescale") {
  BreathTemplate t = toy_template(13, 10, 31);
  Cepstrogram c = toy_cepstrogram(13, 50, 32);
  const IndexSeries base = breathdet::breath_index_track(c, t, false);

  const double g = 3.25;
  for (double &v : t.mean.data) v *= g;
  for (double &v : t.variance.data) v *= g;
  for (double &v : c.m.data) v *= g;
  const IndexSeries scaled = breathdet::breath_index_track(c, t, false);

  REQUIRE(scaled.values.size() == base.values.size());
  for (std::size_t i = 0; i < base.values.size(); ++i)
    CHECK(scaled.values[i] ==
          doctest::Approx(base.values[i]).epsilon(1e-12));
}

TEST_CASE("track refuses a cepstrogram narrower than the template") {
  const BreathTemplate t = toy_template(13, 10, 41);
  const Cepstrogram c = toy_cepstrogram(13, 9, 42);
  CHECK_THROWS_WITH_AS(breathdet::breath_index_track(c, t, false),
                       doctest::Contains("TooShort"), Error);
}

TEST_CASE("parallel index track is bitwise equal to serial") {
  const BreathTemplate t = toy_template(13, 10, 51);
  const Cepstrogram c = toy_cepstrogram(13, 400, 52);
  const IndexSeries s =
      breathdet::breath_index_track(c, t, true, breathdet::Exec::serial);
  const IndexSeries p =
      breathdet::breath_index_track(c, t, true, breathdet::Exec::parallel);
  CHECK(s.values == p.values);
  CHECK(s.times == p.times);
}

TEST_CASE("local peaks are strict interior maxima") {
  CHECK(breathdet::find_peaks({0, 1, 0}) == std::vector<std::size_t>{1});
  CHECK(breathdet::find_peaks({3, 1, 2}).empty());
  CHECK(breathdet::find_peaks({1, 2, 2, 1}).empty());
  CHECK(breathdet::find_peaks({1, 2}).empty());
  CHECK(breathdet::find_peaks({0, 2, 1, 3, 0}) ==
        std::vector<std::size_t>({1, 3}));
}

TEST_CASE("threshold runs become events only when long enough") {
  std::vector<double> v(40, 0.1);
  for (std::size_t i = 5; i < 17; ++i) v[i] = 0.5;  // 12 frames
  const IndexSeries s = series_from(v);

  const auto events = breathdet::detect_events_pattern(s, 0.25, 5);
  REQUIRE(events.size() == 1);
  CHECK(events[0].start_s == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(events[0].end_s ==
        doctest::Approx(s.times[16] + s.window_span_s).epsilon(1e-12));
  CHECK(events[0].duration_s ==
        doctest::Approx(events[0].end_s - events[0].start_s).epsilon(1e-9));
  CHECK(events[0].peak_value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(events[0].detector == "pattern");
}

TEST_CASE("short runs are vetoed and split runs stay split") {
  std::vector<double> v(30, 0.0);
  for (std::size_t i = 3; i < 6; ++i) v[i] = 1.0;  // 3 frames only
  CHECK(breathdet::detect_events_pattern(series_from(v), 0.25, 5).empty());

  std::vector<double> w(40, 0.0);
  for (std::size_t i = 5; i < 12; ++i) w[i] = 1.0;
  w[12] = 0.1;  // one sub-threshold frame splits the run
  for (std::size_t i = 13; i < 20; ++i) w[i] = 1.0;
  const auto events = breathdet::detect_events_pattern(series_from(w), 0.25, 5);
  CHECK(events.size() == 2);
}

TEST_CASE("event counts fall as the threshold or duration veto rises") {
  // Raising the threshold can split one noisy run into several, so monotone
  // counts are a property of single-peaked score humps, not arbitrary traces.
  std::vector<double> v(300, 0.0);
  const double peaks[8] = {0.2, 0.35, 0.5, 0.65, 0.8, 0.95, 0.45, 0.7};
  for (int k = 0; k < 8; ++k) {
    const int mid = 18 + 36 * k;
    for (int d = -11; d <= 11; ++d)
      v[static_cast<std::size_t>(mid + d)] =
          peaks[k] * std::min(1.0, (12.0 - std::abs(d)) / 9.0);
  }
  const IndexSeries s = series_from(v);

  std::size_t prev = SIZE_MAX;
  for (double th : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const std::size_t n = breathdet::detect_events_pattern(s, th, 3).size();
    CHECK(n <= prev);
    prev = n;
  }
  CHECK(breathdet::detect_events_pattern(s, 0.1, 3).size() == 8);
  CHECK(breathdet::detect_events_pattern(s, 0.9, 3).size() == 1);

  // The duration veto filters a fixed run set, so any trace works.
  oracle::TestRng rng(61);
  std::vector<double> w(300);
  for (double &x : w) x = rng.uniform();
  const IndexSeries r = series_from(w);
  prev = SIZE_MAX;
  for (int mf : {1, 2, 4, 8, 16}) {
    const std::size_t n = breathdet::detect_events_pattern(r, 0.3, mf).size();
    CHECK(n <= prev);
    prev = n;
  }
}

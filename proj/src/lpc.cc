// src/lpc.cc

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

#include "breathdet/lpc.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "breathdet/error.h"
#include "breathdet/frontend.h"
#include "event_screen.h"
#include "json.hpp"

namespace breathdet {

using nlohmann::json;

namespace {
// Frames whose input power falls below this are reported as gain 1 (no
// match) instead of raising; a long recording may legitimately contain
// digital silence.
constexpr double kTrackPowerFloor = 1e-20;
}  // namespace

std::vector<double> autocorrelation(const std::vector<double> &x, int order) {
  if (order < 0 || static_cast<std::size_t>(order) >= x.size())
    throw Error(ErrorCode::InvalidArgument, "lag must be below frame length");
  const std::size_t n = x.size();
  std::vector<double> r(order + 1, 0.0);
  for (int k = 0; k <= order; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) acc += x[i] * x[i + k];
    r[k] = acc / static_cast<double>(n);  // biased estimator
  }
  return r;
}

LpcModel solve_lpc(const std::vector<double> &r, int order) {
  if (order < 1 || static_cast<std::size_t>(order) >= r.size())
    throw Error(ErrorCode::InvalidArgument, "order must fit the lag count");
  if (!(r[0] > 0.0))
    throw Error(ErrorCode::SingularSystem, "zero-power frame");

  std::vector<double> a(order, 0.0);
  double e = r[0];
  for (int i = 1; i <= order; ++i) {
    double acc = r[i];
    for (int j = 0; j < i - 1; ++j) acc -= a[j] * r[i - 1 - j];
    if (!(e > 0.0))
      throw Error(ErrorCode::SingularSystem,
                  "prediction error collapsed during the recursion");
    const double k = acc / e;
    std::vector<double> next(a);
    next[i - 1] = k;
    for (int j = 0; j < i - 1; ++j) next[j] = a[j] - k * a[i - 2 - j];
    a = std::move(next);
    e *= (1.0 - k * k);
  }

  double radicand = r[0];
  for (int k = 1; k <= order; ++k) radicand -= a[k - 1] * r[k];
  // Prediction-error energy; only rounding can push it below zero.
  if (radicand < -1e-12 * std::max(1.0, r[0]))
    throw Error(ErrorCode::SingularSystem, "negative prediction error energy");

  LpcModel model;
  model.coeffs = std::move(a);
  model.order = order;
  model.gain = std::sqrt(std::max(radicand, 0.0));
  model.source_autocorrelation = r;
  return model;
}

std::vector<double> inverse_filter(const std::vector<double> &x,
                                   const LpcModel &model) {
  std::vector<double> e(x.size());
  const int order = model.order;
  for (std::size_t n = 0; n < x.size(); ++n) {
    double acc = x[n];
    const int kmax = static_cast<int>(std::min<std::size_t>(order, n));
    for (int k = 1; k <= kmax; ++k) acc -= model.coeffs[k - 1] * x[n - k];
    e[n] = acc;
  }
  return e;
}

double frame_gain(const std::vector<double> &residual_frame,
                  const std::vector<double> &signal_frame) {
  if (residual_frame.size() != signal_frame.size())
    throw Error(ErrorCode::DimensionMismatch, "frame lengths differ");
  if (signal_frame.empty())
    throw Error(ErrorCode::DimensionMismatch, "empty frames");
  double pe = 0.0, py = 0.0;
  for (double v : residual_frame) pe += v * v;
  for (double v : signal_frame) py += v * v;
  const double rms = std::sqrt(py / static_cast<double>(signal_frame.size()));
  if (rms < 1e-12)
    throw Error(ErrorCode::SilentFrame, "original frame has no power");
  return pe / py;
}

void adapt_autocorrelation(std::vector<double> *r,
                           const std::vector<double> &r_frame, double beta) {
  if (r->size() != r_frame.size())
    throw Error(ErrorCode::DimensionMismatch, "lag counts differ");
  if (beta <= 0.0 || beta > 1.0)
    throw Error(ErrorCode::InvalidArgument, "beta outside (0, 1]");
  for (std::size_t k = 0; k < r->size(); ++k)
    (*r)[k] = (1.0 - beta) * (*r)[k] + beta * r_frame[k];
}

GainSeries gain_track(const AudioBuffer &buf, const LpcModel &model,
                      const FrameConfig &fcfg, const LpcConfig &lcfg) {
  const int fl = fcfg.frame_len();
  const int st = fcfg.frame_step();
  if (static_cast<int>(buf.samples.size()) < fl)
    throw Error(ErrorCode::TooShort, "signal shorter than one frame");

  const std::vector<double> y = preemphasize(buf.samples, fcfg.preemphasis);
  const std::size_t nf = (y.size() - fl) / st + 1;

  GainSeries series;
  series.step_s = static_cast<double>(st) / fcfg.sample_rate;
  series.frame_len_s = static_cast<double>(fl) / fcfg.sample_rate;
  series.gains.resize(nf);
  series.powers.resize(nf);
  series.times.resize(nf);

  if (!lcfg.adapt) {
    // The whitener runs once over the whole stream; rectangular frames of
    // signal and residual are then compared power for power.
    const std::vector<double> e = inverse_filter(y, model);
    for (std::size_t i = 0; i < nf; ++i) {
      const std::size_t base = i * st;
      double py = 0.0, pe = 0.0;
      for (int j = 0; j < fl; ++j) {
        py += y[base + j] * y[base + j];
        pe += e[base + j] * e[base + j];
      }
      series.powers[i] = py / fl;
      series.gains[i] = py > kTrackPowerFloor ? pe / py : 1.0;
      series.times[i] = static_cast<double>(base) / fcfg.sample_rate;
    }
    return series;
  }

  // Adaptive mode: the model is refit from a running autocorrelation that
  // absorbs matched frames only, so speech cannot drag the model away.
  std::vector<double> r = model.source_autocorrelation;
  LpcModel current = model;
  for (std::size_t i = 0; i < nf; ++i) {
    const std::size_t base = i * st;
    double py = 0.0, pe = 0.0;
    for (int j = 0; j < fl; ++j) {
      const std::size_t n = base + j;
      double acc = y[n];
      const int kmax =
          static_cast<int>(std::min<std::size_t>(current.order, n));
      for (int k = 1; k <= kmax; ++k) acc -= current.coeffs[k - 1] * y[n - k];
      py += y[n] * y[n];
      pe += acc * acc;
    }
    series.powers[i] = py / fl;
    series.gains[i] = py > kTrackPowerFloor ? pe / py : 1.0;
    series.times[i] = static_cast<double>(base) / fcfg.sample_rate;

    if (series.gains[i] <= lcfg.gain_threshold && py > kTrackPowerFloor) {
      const std::vector<double> frame(y.begin() + base,
                                      y.begin() + base + fl);
      adapt_autocorrelation(&r, autocorrelation(frame, current.order),
                            lcfg.beta);
      try {
        current = solve_lpc(r, current.order);
      } catch (const Error &) {
        // Degenerate update; keep the previous model and keep tracking.
      }
    }
  }
  return series;
}

namespace internal {

std::vector<Run> mask_runs(const std::vector<char> &mask) {
  std::vector<Run> runs;
  std::size_t i = 0;
  while (i < mask.size()) {
    if (!mask[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < mask.size() && mask[j + 1]) ++j;
    runs.push_back({i, j});
    i = j + 1;
  }
  return runs;
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<BreathEvent> screen_runs_to_events(
    const std::vector<Run> &runs, const std::vector<double> &times,
    const std::vector<double> &powers, const std::vector<double> &scores,
    double span_s, const LpcConfig &lcfg, bool score_is_min,
    const std::string &detector) {
  std::vector<BreathEvent> events;
  std::vector<double> breath_powers;
  constexpr std::size_t kHistory = 300;

  for (const Run &run : runs) {
    const double start = times[run.first];
    const double end = times[run.last] + span_s;
    const double dur = end - start;
    if (dur < lcfg.min_dur_s || dur > lcfg.max_dur_s) continue;

    std::vector<double> run_powers(powers.begin() + run.first,
                                   powers.begin() + run.last + 1);
    if (!breath_powers.empty()) {
      const std::size_t lo =
          breath_powers.size() > kHistory ? breath_powers.size() - kHistory
                                          : 0;
      const double ref = median_of(std::vector<double>(
          breath_powers.begin() + lo, breath_powers.end()));
      if (median_of(run_powers) < lcfg.min_power_fraction * ref) continue;
    }
    breath_powers.insert(breath_powers.end(), run_powers.begin(),
                         run_powers.end());

    BreathEvent ev;
    ev.start_s = start;
    ev.end_s = end;
    ev.duration_s = dur;
    double best = scores[run.first];
    for (std::size_t i = run.first + 1; i <= run.last; ++i)
      best = score_is_min ? std::min(best, scores[i])
                          : std::max(best, scores[i]);
    ev.peak_value = best;
    ev.detector = detector;
    events.push_back(ev);
  }
  return events;
}

}  // namespace internal

std::vector<BreathEvent> detect_events_lpc(const GainSeries &series,
                                           const LpcConfig &lcfg) {
  std::vector<char> mask(series.gains.size(), 0);
  for (std::size_t i = 0; i < series.gains.size(); ++i)
    mask[i] = series.gains[i] <= lcfg.gain_threshold;
  // Best score for this detector is the deepest whitening, so min gain.
  return internal::screen_runs_to_events(
      internal::mask_runs(mask), series.times, series.powers, series.gains,
      series.frame_len_s, lcfg, /*score_is_min=*/true, "lpc");
}

void save_lpc_model(const std::string &path, const LpcModel &model) {
  json j{{"version", "lpc1"},
         {"coeffs", model.coeffs},
         {"gain", model.gain},
         {"order", model.order},
         {"source_autocorrelation", model.source_autocorrelation}};
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::CorruptFile, "cannot write " + path);
  out << j.dump(2) << "\n";
}

LpcModel load_lpc_model(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::CorruptFile, "cannot open " + path);
  LpcModel model;
  try {
    json j = json::parse(in);
    if (j.at("version").get<std::string>() != "lpc1")
      throw Error(ErrorCode::CorruptFile, "not an lpc1 model: " + path);
    model.coeffs = j.at("coeffs").get<std::vector<double>>();
    model.gain = j.at("gain").get<double>();
    model.order = j.at("order").get<int>();
    model.source_autocorrelation =
        j.at("source_autocorrelation").get<std::vector<double>>();
  } catch (const json::exception &e) {
    throw Error(ErrorCode::CorruptFile,
                std::string("model parse failure: ") + e.what());
  }
  if (model.order != static_cast<int>(model.coeffs.size()) ||
      model.source_autocorrelation.size() != model.coeffs.size() + 1)
    throw Error(ErrorCode::CorruptFile, "inconsistent model shapes");
  return model;
}

}  // namespace breathdet

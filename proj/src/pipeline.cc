// src/pipeline.cc

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

#include "breathdet/pipeline.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "breathdet/cepstral.h"
#include "breathdet/frontend.h"
#include "breathdet/pattern.h"

namespace breathdet {

DetectResult run_pattern_detect(const AudioBuffer &buf,
                                const BreathTemplate &tmpl,
                                const ToolConfig &cfg, Exec exec) {
  const Cepstrogram c =
      compute_cepstrogram(buf, cfg.frontend, cfg.mel, exec);
  const IndexSeries series =
      breath_index_track(c, tmpl, cfg.pattern.normalize, exec);
  DetectResult result;
  result.events = detect_events_pattern(series, cfg.pattern.threshold,
                                        cfg.pattern.min_frames);
  result.index_times = series.times;
  result.index_values = series.values;
  return result;
}

DetectResult run_lpc_detect(const AudioBuffer &buf, const LpcModel &model,
                            const ToolConfig &cfg) {
  const GainSeries series = gain_track(buf, model, cfg.frontend, cfg.lpc);
  DetectResult result;
  result.events = detect_events_lpc(series, cfg.lpc);
  result.index_times = series.times;
  result.index_values = series.gains;
  return result;
}

DetectResult run_svm_detect(const AudioBuffer &buf, const LpcModel &model,
                            const SvmModel &svm, const ToolConfig &cfg) {
  const GainSeries series = gain_track(buf, model, cfg.frontend, cfg.lpc);
  DetectResult result;
  result.events = detect_events_svm(svm, series, cfg.svm, cfg.lpc);
  // Score trace: decision value per warm window, at window start times.
  const FeatureSet features =
      gain_features(series, svm.feature_window, svm.standardize_mean,
                    svm.standardize_std);
  result.index_values = decision_values(svm, features.inputs);
  result.index_times.assign(series.times.begin(),
                            series.times.begin() +
                                result.index_values.size());
  return result;
}

LpcModel fit_lpc_from_exemplars(const std::vector<AudioBuffer> &exemplars,
                                const ToolConfig &cfg) {
  if (exemplars.size() < 2)
    throw Error(ErrorCode::TooFewExemplars,
                "need at least 2 exemplar recordings");
  const int order = cfg.lpc.order;
  std::vector<double> r_acc(order + 1, 0.0);
  std::size_t count = 0;
  for (const AudioBuffer &ex : exemplars) {
    if (ex.sample_rate != cfg.frontend.sample_rate)
      throw Error(ErrorCode::ConfigMismatch,
                  "exemplar sample rate differs from the configured rate");
    const FrameSet frames = make_frames(ex, cfg.frontend);
    for (const std::vector<double> &frame : frames.frames) {
      const std::vector<double> r = autocorrelation(frame, order);
      for (int k = 0; k <= order; ++k) r_acc[k] += r[k];
      ++count;
    }
  }
  for (double &v : r_acc) v /= static_cast<double>(count);
  return solve_lpc(r_acc, order);
}

SvmModel train_svm_from_scene(const AudioBuffer &buf,
                              const GroundTruth &truth,
                              const LpcModel &model, const ToolConfig &cfg,
                              EvalCounts *verify_counts) {
  const GainSeries series = gain_track(buf, model, cfg.frontend, cfg.lpc);
  return train_svm_from_gains(series, truth, cfg, verify_counts);
}

SvmModel train_svm_from_gains(const GainSeries &series,
                              const GroundTruth &truth,
                              const ToolConfig &cfg,
                              EvalCounts *verify_counts) {
  const LabeledSet all = label_gain_features(
      series, cfg.svm.feature_window, truth.starts, truth.ends, nullptr);

  LabeledSet train, verify;
  split_train_verify(all, cfg.svm.train_fraction, cfg.svm.seed, &train,
                     &verify);

  // Cost cap: stratified subsample of the train split. The kernel solve is
  // cubic in the point count; beyond a couple thousand points accuracy is
  // flat but the solve is not.
  if (cfg.svm.max_train_points > 0 &&
      train.labels.size() >
          static_cast<std::size_t>(cfg.svm.max_train_points)) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < train.labels.size(); ++i)
      (train.labels[i] > 0 ? pos : neg).push_back(i);
    const std::size_t per_class =
        static_cast<std::size_t>(cfg.svm.max_train_points) / 2;
    Rng rng(cfg.svm.seed);
    auto draw = [&rng](std::vector<std::size_t> *cls, std::size_t want) {
      for (std::size_t i = cls->size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(
            rng.uniform() * static_cast<double>(i));
        std::swap((*cls)[i - 1], (*cls)[std::min(j, i - 1)]);
      }
      cls->resize(std::min(want, cls->size()));
    };
    draw(&pos, per_class);
    draw(&neg, per_class);
    std::vector<std::size_t> keep;
    keep.insert(keep.end(), pos.begin(), pos.end());
    keep.insert(keep.end(), neg.begin(), neg.end());
    std::sort(keep.begin(), keep.end());
    LabeledSet sub;
    sub.inputs = Matrix(keep.size(), train.inputs.cols);
    sub.labels.resize(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
      for (std::size_t c = 0; c < train.inputs.cols; ++c)
        sub.inputs(i, c) = train.inputs(keep[i], c);
      sub.labels[i] = train.labels[keep[i]];
    }
    train = std::move(sub);
  }

  // Scalar standardization over every entry of the retained train matrix.
  double mean = 0.0;
  for (double v : train.inputs.data) mean += v;
  mean /= static_cast<double>(train.inputs.data.size());
  double var = 0.0;
  for (double v : train.inputs.data) var += (v - mean) * (v - mean);
  var /= static_cast<double>(train.inputs.data.size());
  const double stddev = std::sqrt(var);
  const double sd = stddev > 0 ? stddev : 1.0;
  for (double &v : train.inputs.data) v = (v - mean) / sd;
  for (double &v : verify.inputs.data) v = (v - mean) / sd;

  SvmModel svm = train_svm(train, cfg.svm);
  svm.standardize_mean = mean;
  svm.standardize_std = sd;
  if (verify_counts) *verify_counts = evaluate(svm, verify);
  return svm;
}

double CompareResult::recall() const {
  const std::size_t refs = matches.size() + missed_refs.size();
  return refs ? static_cast<double>(matches.size()) / refs : 0.0;
}

double CompareResult::precision() const {
  const std::size_t dets = matches.size() + false_alarms.size();
  return dets ? static_cast<double>(matches.size()) / dets : 0.0;
}

CompareResult compare_events(const std::vector<BreathEvent> &detected,
                             const std::vector<BreathEvent> &reference,
                             double tolerance_s) {
  CompareResult result;
  std::vector<bool> ref_taken(reference.size(), false);
  for (std::size_t d = 0; d < detected.size(); ++d) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_ref = reference.size();
    for (std::size_t r = 0; r < reference.size(); ++r) {
      if (ref_taken[r]) continue;
      const double err = std::fabs(detected[d].start_s - reference[r].start_s);
      if (err < best) {
        best = err;
        best_ref = r;
      }
    }
    if (best_ref < reference.size() && best <= tolerance_s) {
      ref_taken[best_ref] = true;
      EventMatch match;
      match.detected_idx = d;
      match.reference_idx = best_ref;
      match.start_error_s = best;
      match.duration_error_s = std::fabs(detected[d].duration_s -
                                         reference[best_ref].duration_s);
      result.matches.push_back(match);
    } else {
      result.false_alarms.push_back(d);
    }
  }
  for (std::size_t r = 0; r < reference.size(); ++r)
    if (!ref_taken[r]) result.missed_refs.push_back(r);
  return result;
}

}  // namespace breathdet

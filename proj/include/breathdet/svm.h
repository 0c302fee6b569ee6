// include/breathdet/svm.h

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

#ifndef BREATHDET_SVM_H_
#define BREATHDET_SVM_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "breathdet/config.h"
#include "breathdet/events.h"
#include "breathdet/lpc.h"
#include "breathdet/types.h"

namespace breathdet {

struct LabeledSet {
  Matrix inputs;               // one row per point
  std::vector<double> labels;  // +1 / -1
};

// Least-squares SVM trained on every retained point; all become supports.
struct SvmModel {
  Matrix support_inputs;
  std::vector<double> dual_weights;
  double bias = 0.0;
  double gamma = 0.0;
  double kernel_scale = 0.0;
  int kernel_degree = 0;
  int feature_window = 0;
  // Scalar standardization of log-gain features (train-set statistics).
  double standardize_mean = 0.0;
  double standardize_std = 1.0;
};

// k(u, v) = (scale * u.v)^degree.
double kernel(const std::vector<double> &u, const std::vector<double> &v,
              double scale, int degree);

// Gram matrix of a against b (rows of each are points).
Matrix kernel_matrix(const Matrix &a, const Matrix &b, double scale,
                     int degree, Exec exec = Exec::serial);

// Deterministic stratified split; verify gets the complement.
void split_train_verify(const LabeledSet &all, double train_fraction,
                        std::uint32_t seed, LabeledSet *train,
                        LabeledSet *verify);

// Solves (K + gamma I) alpha = y, bias = mean(y - K alpha). Throws
// IllConditioned when the refined residual stays above tolerance.
SvmModel train_svm(const LabeledSet &train, const SvmConfig &cfg);

// Decision value per row of inputs; sign >= 0 classifies as breath.
std::vector<double> decision_values(const SvmModel &model,
                                    const Matrix &inputs);
std::vector<int> classify(const SvmModel &model, const Matrix &inputs);

// Sliding windows of log gain, standardized by stored train statistics.
// Row i holds frames [i, i+window); its time is the centre frame's.
struct FeatureSet {
  Matrix inputs;
  std::vector<double> times;  // centre-frame seconds
  double step_s = 0.0;
};
FeatureSet gain_features(const GainSeries &gains, int feature_window,
                         double mean, double stddev);

// Raw (unstandardized) windows plus labels from ground-truth intervals:
// +1 when the centre frame falls inside an inhalation.
LabeledSet label_gain_features(const GainSeries &gains, int feature_window,
                               const std::vector<double> &starts,
                               const std::vector<double> &ends,
                               std::vector<double> *times);

struct EvalCounts {
  std::size_t true_pos = 0, true_neg = 0, false_pos = 0, false_neg = 0;
  double accuracy() const;
};
EvalCounts evaluate(const SvmModel &model, const LabeledSet &set);

// Runs of breath-classified feature windows become events. Gaps shorter
// than scfg.merge_gap_s are closed first, then the same duration vetoes and
// low-power screen as the gain-only detector apply.
std::vector<BreathEvent> detect_events_svm(const SvmModel &model,
                                           const GainSeries &gains,
                                           const SvmConfig &scfg,
                                           const LpcConfig &lcfg);

// svm1 container round trip.
void save_svm_model(const std::string &path, const SvmModel &model);
SvmModel load_svm_model(const std::string &path);

}  // namespace breathdet

#endif  // BREATHDET_SVM_H_

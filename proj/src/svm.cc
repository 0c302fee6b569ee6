// src/svm.cc

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

#include "breathdet/svm.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <Eigen/Dense>

#include "breathdet/error.h"
#include "breathdet/synth.h"
#include "event_screen.h"
#include "json.hpp"

namespace breathdet {

using nlohmann::json;

namespace {
constexpr double kKernelScale = 0.6;
constexpr int kKernelDegree = 3;
constexpr double kLogGainFloor = 1e-12;
// Normwise backward-error bound for accepting a solve. The achievable
// residual scales with ||A||*||alpha||, so the test must be relative.
constexpr double kSolveTolerance = 1e-8;

double poly_kernel(double dot, double scale, int degree) {
  const double base = scale * dot;
  double acc = 1.0;
  for (int i = 0; i < degree; ++i) acc *= base;
  return acc;
}

}  // namespace

double kernel(const std::vector<double> &u, const std::vector<double> &v,
              double scale, int degree) {
  if (u.size() != v.size())
    throw Error(ErrorCode::DimensionMismatch, "kernel input lengths differ");
  double dot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
  return poly_kernel(dot, scale, degree);
}

Matrix kernel_matrix(const Matrix &a, const Matrix &b, double scale,
                     int degree, Exec exec) {
  if (a.cols != b.cols)
    throw Error(ErrorCode::DimensionMismatch, "feature dimensions differ");
  Matrix k(a.rows, b.rows);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.rows);
  // Rows are independent; identical arithmetic per row in both modes.
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < b.rows; ++j) {
        double dot = 0.0;
        for (std::size_t d = 0; d < a.cols; ++d) dot += a(i, d) * b(j, d);
        k(i, j) = poly_kernel(dot, scale, degree);
      }
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < b.rows; ++j) {
        double dot = 0.0;
        for (std::size_t d = 0; d < a.cols; ++d) dot += a(i, d) * b(j, d);
        k(i, j) = poly_kernel(dot, scale, degree);
      }
    }
  }
  return k;
}

namespace {

Matrix take_rows(const Matrix &m, const std::vector<std::size_t> &idx) {
  Matrix out(idx.size(), m.cols);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t c = 0; c < m.cols; ++c) out(i, c) = m(idx[i], c);
  return out;
}

std::vector<double> take_labels(const std::vector<double> &labels,
                                const std::vector<std::size_t> &idx) {
  std::vector<double> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = labels[idx[i]];
  return out;
}

void shuffle_indices(std::vector<std::size_t> *idx, Rng *rng) {
  for (std::size_t i = idx->size(); i > 1; --i) {
    const std::size_t j =
        static_cast<std::size_t>(rng->uniform() * static_cast<double>(i));
    std::swap((*idx)[i - 1], (*idx)[std::min(j, i - 1)]);
  }
}

}  // namespace

void split_train_verify(const LabeledSet &all, double train_fraction,
                        std::uint32_t seed, LabeledSet *train,
                        LabeledSet *verify) {
  if (train_fraction <= 0.0 || train_fraction >= 1.0)
    throw Error(ErrorCode::InvalidArgument, "train_fraction outside (0, 1)");
  if (all.labels.size() != all.inputs.rows)
    throw Error(ErrorCode::DimensionMismatch, "label count mismatch");

  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < all.labels.size(); ++i)
    (all.labels[i] > 0 ? pos : neg).push_back(i);
  if (pos.size() < 2 || neg.size() < 2)
    throw Error(ErrorCode::TooSmall, "each class needs at least 2 examples");

  Rng rng(seed);
  std::vector<std::size_t> train_idx, verify_idx;
  for (auto *cls : {&pos, &neg}) {
    shuffle_indices(cls, &rng);
    // Both splits keep at least one member of every class.
    std::size_t n_train = static_cast<std::size_t>(
        std::lround(train_fraction * static_cast<double>(cls->size())));
    n_train = std::clamp<std::size_t>(n_train, 1, cls->size() - 1);
    train_idx.insert(train_idx.end(), cls->begin(), cls->begin() + n_train);
    verify_idx.insert(verify_idx.end(), cls->begin() + n_train, cls->end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(verify_idx.begin(), verify_idx.end());

  train->inputs = take_rows(all.inputs, train_idx);
  train->labels = take_labels(all.labels, train_idx);
  verify->inputs = take_rows(all.inputs, verify_idx);
  verify->labels = take_labels(all.labels, verify_idx);
}

SvmModel train_svm(const LabeledSet &train, const SvmConfig &cfg) {
  const std::size_t n = train.inputs.rows;
  if (n == 0 || train.labels.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "label count mismatch");
  for (double y : train.labels)
    if (y != 1.0 && y != -1.0)
      throw Error(ErrorCode::InvalidArgument, "labels must be +1 or -1");

  const Matrix km =
      kernel_matrix(train.inputs, train.inputs, kKernelScale, kKernelDegree);
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = km(i, j);
  for (std::size_t i = 0; i < n; ++i) a(i, i) += cfg.gamma;

  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) y(i) = train.labels[i];

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd alpha = lu.solve(y);
  // Two refinement sweeps recover the last bits the factorization loses.
  for (int sweep = 0; sweep < 2; ++sweep) {
    Eigen::VectorXd resid = y - a * alpha;
    alpha += lu.solve(resid);
  }
  const double resid_norm = (y - a * alpha).lpNorm<Eigen::Infinity>();
  // Labels are +-1, so the scale term below is always at least 1.
  const double scale = y.lpNorm<Eigen::Infinity>() +
                       a.cwiseAbs().rowwise().sum().maxCoeff() *
                           alpha.lpNorm<Eigen::Infinity>();
  if (!alpha.allFinite() || !(resid_norm <= kSolveTolerance * scale))
    throw Error(ErrorCode::IllConditioned,
                "solve backward error " +
                    std::to_string(resid_norm / scale) + " exceeds tolerance");

  SvmModel model;
  model.support_inputs = train.inputs;
  model.dual_weights.assign(alpha.data(), alpha.data() + n);
  model.gamma = cfg.gamma;
  model.kernel_scale = kKernelScale;
  model.kernel_degree = kKernelDegree;
  model.feature_window = cfg.feature_window;

  // bias = mean(y - K alpha), using the unregularized kernel matrix.
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double ka = 0.0;
    for (std::size_t j = 0; j < n; ++j) ka += km(i, j) * model.dual_weights[j];
    acc += train.labels[i] - ka;
  }
  model.bias = acc / static_cast<double>(n);
  return model;
}

std::vector<double> decision_values(const SvmModel &model,
                                    const Matrix &inputs) {
  if (inputs.cols != model.support_inputs.cols)
    throw Error(ErrorCode::DimensionMismatch,
                "feature dimension does not match the model");
  std::vector<double> dec(inputs.rows);
  for (std::size_t i = 0; i < inputs.rows; ++i) {
    double acc = model.bias;
    for (std::size_t j = 0; j < model.support_inputs.rows; ++j) {
      double dot = 0.0;
      for (std::size_t d = 0; d < inputs.cols; ++d)
        dot += inputs(i, d) * model.support_inputs(j, d);
      acc += model.dual_weights[j] *
             poly_kernel(dot, model.kernel_scale, model.kernel_degree);
    }
    dec[i] = acc;
  }
  return dec;
}

std::vector<int> classify(const SvmModel &model, const Matrix &inputs) {
  const std::vector<double> dec = decision_values(model, inputs);
  std::vector<int> labels(dec.size());
  for (std::size_t i = 0; i < dec.size(); ++i)
    labels[i] = dec[i] >= 0.0 ? 1 : -1;  // exact zero counts as breath
  return labels;
}

FeatureSet gain_features(const GainSeries &gains, int feature_window,
                         double mean, double stddev) {
  const std::size_t w = static_cast<std::size_t>(feature_window);
  if (feature_window < 1)
    throw Error(ErrorCode::InvalidArgument, "feature_window must be >= 1");
  if (gains.gains.size() < w)
    throw Error(ErrorCode::TooShort, "gain series shorter than the window");
  const double sd = stddev > 0 ? stddev : 1.0;

  const std::size_t n = gains.gains.size() - w + 1;
  FeatureSet set;
  set.inputs = Matrix(n, w);
  set.times.resize(n);
  set.step_s = gains.step_s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < w; ++j)
      set.inputs(i, j) =
          (std::log(std::max(gains.gains[i + j], kLogGainFloor)) - mean) / sd;
    set.times[i] = gains.times[i] + (w - 1) / 2.0 * gains.step_s;
  }
  return set;
}

LabeledSet label_gain_features(const GainSeries &gains, int feature_window,
                               const std::vector<double> &starts,
                               const std::vector<double> &ends,
                               std::vector<double> *times) {
  if (starts.size() != ends.size())
    throw Error(ErrorCode::DimensionMismatch, "interval list mismatch");
  const FeatureSet raw = gain_features(gains, feature_window, 0.0, 1.0);
  LabeledSet set;
  set.inputs = raw.inputs;
  set.labels.assign(raw.times.size(), -1.0);
  for (std::size_t i = 0; i < raw.times.size(); ++i)
    for (std::size_t k = 0; k < starts.size(); ++k)
      if (raw.times[i] >= starts[k] && raw.times[i] < ends[k]) {
        set.labels[i] = 1.0;
        break;
      }
  if (times) *times = raw.times;
  return set;
}

double EvalCounts::accuracy() const {
  const std::size_t total = true_pos + true_neg + false_pos + false_neg;
  return total ? static_cast<double>(true_pos + true_neg) / total : 0.0;
}

EvalCounts evaluate(const SvmModel &model, const LabeledSet &set) {
  const std::vector<int> pred = classify(model, set.inputs);
  EvalCounts counts;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool truth_pos = set.labels[i] > 0;
    const bool pred_pos = pred[i] > 0;
    if (truth_pos && pred_pos) ++counts.true_pos;
    else if (!truth_pos && !pred_pos) ++counts.true_neg;
    else if (!truth_pos && pred_pos) ++counts.false_pos;
    else ++counts.false_neg;
  }
  return counts;
}

std::vector<BreathEvent> detect_events_svm(const SvmModel &model,
                                           const GainSeries &gains,
                                           const SvmConfig &scfg,
                                           const LpcConfig &lcfg) {
  const FeatureSet features =
      gain_features(gains, model.feature_window, model.standardize_mean,
                    model.standardize_std);
  const std::vector<double> dec = decision_values(model, features.inputs);
  std::vector<char> mask(dec.size(), 0);
  for (std::size_t i = 0; i < dec.size(); ++i) mask[i] = dec[i] >= 0.0;

  // Close brief dips so a mid-breath wobble does not split one breath into
  // a matched fragment plus a false alarm.
  std::vector<internal::Run> runs;
  for (const internal::Run &run : internal::mask_runs(mask)) {
    if (!runs.empty() &&
        features.times[run.first] - features.times[runs.back().last] <=
            scfg.merge_gap_s)
      runs.back().last = run.last;
    else
      runs.push_back(run);
  }

  // Window i's power is taken at its first frame, aligned with the mask.
  const std::vector<double> powers(gains.powers.begin(),
                                   gains.powers.begin() + dec.size());
  return internal::screen_runs_to_events(runs, features.times, powers, dec,
                                         /*span_s=*/0.0, lcfg,
                                         /*score_is_min=*/false, "lpc_svm");
}

void save_svm_model(const std::string &path, const SvmModel &model) {
  json j{{"version", "svm1"},
         {"support_inputs",
          json{{"rows", model.support_inputs.rows},
               {"cols", model.support_inputs.cols},
               {"data", model.support_inputs.data}}},
         {"dual_weights", model.dual_weights},
         {"bias", model.bias},
         {"gamma", model.gamma},
         {"kernel_scale", model.kernel_scale},
         {"kernel_degree", model.kernel_degree},
         {"feature_window", model.feature_window},
         {"standardization",
          json{{"mean", model.standardize_mean},
               {"stddev", model.standardize_std}}}};
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::CorruptFile, "cannot write " + path);
  out << j.dump(2) << "\n";
}

SvmModel load_svm_model(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::CorruptFile, "cannot open " + path);
  SvmModel model;
  try {
    json j = json::parse(in);
    if (j.at("version").get<std::string>() != "svm1")
      throw Error(ErrorCode::CorruptFile, "not an svm1 model: " + path);
    const json &si = j.at("support_inputs");
    model.support_inputs.rows = si.at("rows").get<std::size_t>();
    model.support_inputs.cols = si.at("cols").get<std::size_t>();
    model.support_inputs.data = si.at("data").get<std::vector<double>>();
    model.dual_weights = j.at("dual_weights").get<std::vector<double>>();
    model.bias = j.at("bias").get<double>();
    model.gamma = j.at("gamma").get<double>();
    model.kernel_scale = j.at("kernel_scale").get<double>();
    model.kernel_degree = j.at("kernel_degree").get<int>();
    model.feature_window = j.at("feature_window").get<int>();
    model.standardize_mean = j.at("standardization").at("mean").get<double>();
    model.standardize_std =
        j.at("standardization").at("stddev").get<double>();
  } catch (const json::exception &e) {
    throw Error(ErrorCode::CorruptFile,
                std::string("model parse failure: ") + e.what());
  }
  if (model.support_inputs.data.size() !=
          model.support_inputs.rows * model.support_inputs.cols ||
      model.dual_weights.size() != model.support_inputs.rows)
    throw Error(ErrorCode::CorruptFile, "inconsistent model shapes");
  return model;
}

}  // namespace breathdet

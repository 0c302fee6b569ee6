// src/breath_template.cc

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

#include "breathdet/breath_template.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

#include "breathdet/cepstral.h"
#include "breathdet/error.h"
#include "json.hpp"

namespace breathdet {

using nlohmann::json;

Matrix remove_column_dc(const Matrix &m) {
  Matrix out = m;
  for (std::size_t c = 0; c < m.cols; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r) mean += m(r, c);
    mean /= static_cast<double>(m.rows);
    for (std::size_t r = 0; r < m.rows; ++r) out(r, c) = m(r, c) - mean;
  }
  return out;
}

Matrix fit_columns(const Matrix &m, std::size_t cols) {
  Matrix out(m.rows, cols, 0.0);
  const std::size_t keep = std::min(m.cols, cols);
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < keep; ++c) out(r, c) = m(r, c);
  if (cols > m.cols) {
    for (std::size_t r = 0; r < m.rows; ++r) {
      double mean = 0.0;
      for (std::size_t c = 0; c < m.cols; ++c) mean += m(r, c);
      mean /= static_cast<double>(m.cols);
      for (std::size_t c = m.cols; c < cols; ++c) out(r, c) = mean;
    }
  }
  return out;
}

BreathTemplate build_template(const std::vector<AudioBuffer> &exemplars,
                              const FrameConfig &fcfg, const MelConfig &mcfg,
                              int target_subframes) {
  if (exemplars.size() < 2)
    throw Error(ErrorCode::TooFewExemplars,
                "sample standard deviation needs at least 2 exemplars");
  const std::size_t width = static_cast<std::size_t>(target_subframes);
  const std::size_t rows = static_cast<std::size_t>(mcfg.num_coeffs);

  std::vector<Matrix> mats;
  mats.reserve(exemplars.size());
  for (const AudioBuffer &ex : exemplars) {
    if (ex.sample_rate != fcfg.sample_rate)
      throw Error(ErrorCode::ConfigMismatch,
                  "exemplar sample rate differs from the frontend rate");
    if (static_cast<int>(ex.samples.size()) < fcfg.frame_len())
      throw Error(ErrorCode::ShapeMismatch, "exemplar shorter than one frame");
    const Cepstrogram c = compute_cepstrogram(ex, fcfg, mcfg);
    mats.push_back(fit_columns(remove_column_dc(c.m), width));
  }

  BreathTemplate t;
  t.n_exemplars = static_cast<int>(exemplars.size());
  t.fingerprint = frontend_fingerprint(fcfg, mcfg);
  t.mean = Matrix(rows, width, 0.0);
  for (const Matrix &m : mats)
    for (std::size_t i = 0; i < m.data.size(); ++i) t.mean.data[i] += m.data[i];
  for (double &v : t.mean.data) v /= static_cast<double>(mats.size());

  t.variance = Matrix(rows, width, 0.0);
  for (const Matrix &m : mats)
    for (std::size_t i = 0; i < m.data.size(); ++i) {
      const double d = m.data[i] - t.mean.data[i];
      t.variance.data[i] += d * d;
    }
  double vmax = 0.0;
  for (double &v : t.variance.data) {
    v = std::sqrt(v / static_cast<double>(mats.size() - 1));
    vmax = std::max(vmax, v);
  }
  const double floor = std::max(1e-6 * vmax, 1e-12);
  for (double &v : t.variance.data) v = std::max(v, floor);

  Eigen::MatrixXd em(rows, width);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < width; ++c) em(r, c) = t.mean(r, c);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(em, Eigen::ComputeThinU);
  Eigen::VectorXd s1 = svd.matrixU().col(0);
  // SVD sign is arbitrary; pin it so the dominant entry is positive.
  Eigen::Index imax = 0;
  s1.cwiseAbs().maxCoeff(&imax);
  if (s1(imax) < 0.0) s1 = -s1;
  t.singular.assign(s1.data(), s1.data() + s1.size());
  return t;
}

namespace {

json matrix_to_json(const Matrix &m) {
  return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Matrix matrix_from_json(const json &j) {
  Matrix m;
  m.rows = j.at("rows").get<std::size_t>();
  m.cols = j.at("cols").get<std::size_t>();
  m.data = j.at("data").get<std::vector<double>>();
  if (m.data.size() != m.rows * m.cols)
    throw Error(ErrorCode::CorruptFile, "matrix payload size mismatch");
  return m;
}

}  // namespace

void save_template(const BreathTemplate &t, const std::string &path) {
  json j{{"version", "bt1"},
         {"mean", matrix_to_json(t.mean)},
         {"variance", matrix_to_json(t.variance)},
         {"singular", t.singular},
         {"fingerprint", t.fingerprint},
         {"n_exemplars", t.n_exemplars}};
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::CorruptFile, "cannot write " + path);
  out << j.dump(2) << "\n";
}

BreathTemplate load_template(const std::string &path, const FrameConfig &fcfg,
                             const MelConfig &mcfg) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::CorruptFile, "cannot open " + path);
  BreathTemplate t;
  try {
    json j = json::parse(in);
    if (j.at("version").get<std::string>() != "bt1")
      throw Error(ErrorCode::CorruptFile, "not a bt1 template: " + path);
    t.mean = matrix_from_json(j.at("mean"));
    t.variance = matrix_from_json(j.at("variance"));
    t.singular = j.at("singular").get<std::vector<double>>();
    t.fingerprint = j.at("fingerprint").get<std::string>();
    t.n_exemplars = j.at("n_exemplars").get<int>();
  } catch (const json::exception &e) {
    throw Error(ErrorCode::CorruptFile,
                std::string("template parse failure: ") + e.what());
  }
  if (!t.mean.same_shape(t.variance) || t.singular.size() != t.mean.rows)
    throw Error(ErrorCode::CorruptFile, "inconsistent template shapes");
  if (t.fingerprint != frontend_fingerprint(fcfg, mcfg))
    throw Error(ErrorCode::FingerprintMismatch,
                "template was built under a different frontend config");
  return t;
}

}  // namespace breathdet

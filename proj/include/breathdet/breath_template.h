// include/breathdet/breath_template.h

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

#ifndef BREATHDET_BREATH_TEMPLATE_H_
#define BREATHDET_BREATH_TEMPLATE_H_

#include <string>
#include <vector>

#include "breathdet/audio.h"
#include "breathdet/config.h"
#include "breathdet/types.h"

namespace breathdet {

struct BreathTemplate {
  Matrix mean;                  // T, num_coeffs x target_subframes
  Matrix variance;              // V, elementwise sample std dev, floored
  std::vector<double> singular; // S_1, unit first left singular vector of T
  std::string fingerprint;      // frontend config the template was built under
  int n_exemplars = 0;
};

// Per-column mean over coefficients removed ("DC" of each cepstral vector).
Matrix remove_column_dc(const Matrix &m);

// Truncate to `cols` columns, or right-pad with each row's mean.
Matrix fit_columns(const Matrix &m, std::size_t cols);

BreathTemplate build_template(const std::vector<AudioBuffer> &exemplars,
                              const FrameConfig &fcfg, const MelConfig &mcfg,
                              int target_subframes);

// bt1 JSON container. Loading verifies the fingerprint against the given
// frontend config.
void save_template(const BreathTemplate &t, const std::string &path);
BreathTemplate load_template(const std::string &path, const FrameConfig &fcfg,
                             const MelConfig &mcfg);

}  // namespace breathdet

#endif  // BREATHDET_BREATH_TEMPLATE_H_

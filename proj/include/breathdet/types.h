// include/breathdet/types.h

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

#ifndef BREATHDET_TYPES_H_
#define BREATHDET_TYPES_H_

#include <cstddef>
#include <vector>

#include "breathdet/error.h"

namespace breathdet {

// Execution policy for the hot kernels. Parallel variants partition work
// over independent elements only, so results are bitwise identical to
// serial regardless of thread count.
enum class Exec { serial, parallel };

// Dense row-major matrix of doubles. Deliberately minimal: the library's
// public surface stays free of third-party linear-algebra types.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double &operator()(std::size_t r, std::size_t c) {
    return data[r * cols + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  bool same_shape(const Matrix &other) const {
    return rows == other.rows && cols == other.cols;
  }
};

}  // namespace breathdet

#endif  // BREATHDET_TYPES_H_

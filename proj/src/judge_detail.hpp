/*
 * Copyright 2026 The colabel Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "colabel/judge.hpp"

namespace colabel::detail {

// out = softmax(x W + b) for a single row.
inline void softmax_row(const Matrix& weights, std::span<const double> bias, std::span<const double> x,
                        std::span<double> out) {
  const std::size_t classes = weights.cols();
  for (std::size_t c = 0; c < classes; ++c) out[c] = bias[c];
  for (std::size_t f = 0; f < x.size(); ++f) {
    const double xf = x[f];
    if (xf == 0.0) continue;
    auto w = weights.row(f);
    for (std::size_t c = 0; c < classes; ++c) out[c] += xf * w[c];
  }
  double mx = *std::max_element(out.begin(), out.end());
  double sum = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    out[c] = std::exp(out[c] - mx);
    sum += out[c];
  }
  for (std::size_t c = 0; c < classes; ++c) out[c] /= sum;
}

}  // namespace colabel::detail

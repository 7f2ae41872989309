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

#include "colabel/judge.hpp"

#include <cmath>

#include "colabel/error.hpp"
#include "../judge_detail.hpp"

namespace colabel::reference {

FeatureMatrix propagate(const FeatureMatrix& features, const Graph& graph, std::size_t hops) {
  if (features.rows() != graph.num_nodes()) throw Error("feature rows do not match graph nodes");
  const std::size_t n = graph.num_nodes();
  const std::size_t cols = features.cols();
  std::vector<double> deg_tilde(n);
  for (NodeId v = 0; v < n; ++v) deg_tilde[v] = static_cast<double>(graph.degree(v)) + 1.0;

  FeatureMatrix current = features;
  for (std::size_t hop = 0; hop < hops; ++hop) {
    FeatureMatrix next(n, cols);
    for (NodeId v = 0; v < n; ++v) {
      for (std::size_t f = 0; f < cols; ++f) next(v, f) += current(v, f) / deg_tilde[v];
    }
    for (const auto& [u, v] : graph.edges()) {
      const double w = 1.0 / std::sqrt(deg_tilde[u] * deg_tilde[v]);
      for (std::size_t f = 0; f < cols; ++f) {
        next(u, f) += w * current(v, f);
        next(v, f) += w * current(u, f);
      }
    }
    current = std::move(next);
  }
  return current;
}

ProbMatrix predict_proba(const JudgeModel& model, const FeatureMatrix& smoothed) {
  if (smoothed.cols() != model.num_features()) throw Error("feature dimension does not match judge");
  ProbMatrix out(smoothed.rows(), model.num_classes());
  for (std::size_t r = 0; r < smoothed.rows(); ++r) {
    detail::softmax_row(model.weights, model.bias, smoothed.row(r), out.row(r));
  }
  return out;
}

}  // namespace colabel::reference

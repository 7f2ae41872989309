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

#include <span>
#include <vector>

#include "colabel/influence.hpp"

namespace colabel::detail {

// Validates sources/candidates and returns a table with one empty entry per
// candidate plus the node -> entry index map (-1 for non-candidates).
struct ScoreLayout {
  InfluenceScoreTable table;
  std::vector<std::ptrdiff_t> position;
  std::vector<NodeId> sources;  // sorted, deduplicated
};

ScoreLayout make_score_layout(const Graph& graph, std::span<const NodeId> sources,
                              std::span<const NodeId> unlabeled);

// Strict total order on (log_score desc, source asc) for reachable candidates.
inline bool improves(double log_score, NodeId source, const InfluenceScore& current) {
  if (log_score > current.log_score) return true;
  return log_score == current.log_score && current.best_source != kNoSource && source < current.best_source;
}

// Folds one source's profiles into the running maxima.
void fold_profile(const std::vector<InfluenceProfile>& profile, const std::vector<NodeId>& visited,
                  NodeId source, const std::vector<std::ptrdiff_t>& position, std::vector<InfluenceScore>& best);

}  // namespace colabel::detail

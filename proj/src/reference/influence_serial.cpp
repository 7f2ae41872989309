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

#include "colabel/influence.hpp"

#include "../influence_detail.hpp"

namespace colabel::reference {

InfluenceScoreTable influence_scores(const Graph& graph, std::span<const NodeId> sources,
                                     std::span<const NodeId> unlabeled) {
  auto layout = detail::make_score_layout(graph, sources, unlabeled);
  ProfileBuilder builder(graph);
  for (NodeId s : layout.sources) {
    const auto& profile = builder.run(s);
    detail::fold_profile(profile, builder.visited(), s, layout.position, layout.table.entries);
  }
  return std::move(layout.table);
}

}  // namespace colabel::reference

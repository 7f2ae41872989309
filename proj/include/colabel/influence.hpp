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

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colabel/graph.hpp"

namespace colabel {

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();
inline constexpr NodeId kNoSource = std::numeric_limits<NodeId>::max();

// Shortest-path statistics from one source to one target. Counts and degree
// products are kept as natural logs so dense graphs cannot overflow.
struct InfluenceProfile {
  std::uint32_t dist = kUnreachable;
  double log_path_count = 0.0;
  // min over shortest paths of the summed log-degrees of the target and all
  // intermediate nodes; the source's own degree is not part of the product.
  double min_log_degprod = 0.0;

  bool reachable() const noexcept { return dist != kUnreachable; }
  double log_bound() const noexcept {
    return reachable() ? log_path_count - min_log_degprod : -std::numeric_limits<double>::infinity();
  }
};

// Reusable BFS buffers. run() only resets the nodes touched by the previous
// call, so repeated sources on a large sparse graph stay proportional to the
// reached component.
class ProfileBuilder {
 public:
  explicit ProfileBuilder(const Graph& graph);

  const std::vector<InfluenceProfile>& run(NodeId source);
  // Nodes reached by the last run, in BFS order (source first).
  const std::vector<NodeId>& visited() const noexcept { return order_; }

 private:
  const Graph* graph_;
  std::vector<double> log_degree_;
  std::vector<InfluenceProfile> profile_;
  std::vector<NodeId> order_;
};

// Single-source profile for every node of the graph.
std::vector<InfluenceProfile> shortest_path_profile(const Graph& graph, NodeId source);

struct InfluenceScore {
  NodeId node = 0;
  double log_score = -std::numeric_limits<double>::infinity();
  NodeId best_source = kNoSource;
  std::uint32_t dist = kUnreachable;

  bool positive() const noexcept { return best_source != kNoSource; }
};

// One entry per candidate node, ascending node id.
struct InfluenceScoreTable {
  std::vector<InfluenceScore> entries;
};

// log IS(v) = max over sources of the profile log-bound. Ties between sources
// go to the smaller source id. Runs sources in parallel; the result is
// bit-identical to reference::influence_scores.
InfluenceScoreTable influence_scores(const Graph& graph, std::span<const NodeId> sources,
                                     std::span<const NodeId> unlabeled);

// All nodes not in `sources`, ascending.
std::vector<NodeId> complement_nodes(std::size_t n_nodes, std::span<const NodeId> sources);

// Zeroes (log -inf) the score of candidates farther than max_hops from their best source.
void restrict_to_hops(InfluenceScoreTable& table, std::uint32_t max_hops);

struct TopKSelection {
  std::vector<NodeId> nodes;
  std::vector<double> log_scores;
  std::optional<std::string> shortfall_warning;
};

// Highest scores first, ties by ascending node id; only positive scores are eligible.
TopKSelection select_top_k(const InfluenceScoreTable& table, std::size_t k);

// (A_hat^hops)[target, source] with A_hat = D^-1 A, by repeated sparse
// multiplication of the source indicator. Test oracle; n <= 200.
double brute_force_influence(const Graph& graph, NodeId source, NodeId target, std::size_t hops);

struct BoundCheck {
  std::size_t pairs = 0;
  // max over connected pairs of oracle - bound (<= 0 when the bound holds).
  double max_excess = -std::numeric_limits<double>::infinity();
  // max over connected pairs of |oracle - bound|.
  double max_abs_gap = 0.0;
};

// Compares every (source, reachable target != source) pair against the oracle.
BoundCheck check_influence_bounds(const Graph& graph, std::span<const NodeId> sources);

void write_scores_csv(const InfluenceScoreTable& table, std::ostream& out);
std::string selection_to_json(const TopKSelection& selection);
std::vector<NodeId> selection_from_json(const std::string& json_text, const std::string& source_name = "<selection>");

namespace reference {

InfluenceScoreTable influence_scores(const Graph& graph, std::span<const NodeId> sources,
                                     std::span<const NodeId> unlabeled);

}  // namespace reference

}  // namespace colabel

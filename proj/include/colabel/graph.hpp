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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace colabel {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

// Immutable undirected graph in compressed sparse row form. Neighbor lists are
// sorted, symmetric, and free of self-loops and duplicates.
class Graph {
 public:
  Graph() = default;

  // Symmetrizes, drops self-loops and duplicates. Throws if an id >= n_nodes.
  static Graph from_edges(std::size_t n_nodes, std::span<const Edge> edges);

  std::size_t num_nodes() const noexcept { return degrees_.size(); }
  std::size_t num_edges() const noexcept { return adjacency_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::uint32_t degree(NodeId v) const { return degrees_[v]; }
  std::span<const std::uint32_t> degrees() const noexcept { return degrees_; }

  bool has_edge(NodeId u, NodeId v) const;

  // Each undirected edge once, as (min, max), in ascending order.
  std::vector<Edge> edges() const;

  bool operator==(const Graph&) const = default;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> adjacency_;
  std::vector<std::uint32_t> degrees_;
};

// Edge-list text: optional first line "n=<N>", then "src<TAB>dst" per line.
// Blank lines are ignored.
Graph read_edge_list(std::istream& in, const std::string& source_name = "<edge list>");
Graph load_graph(const std::filesystem::path& path);

// Writes the header line and each undirected edge once.
void write_edge_list(const Graph& graph, std::ostream& out);
void save_graph(const Graph& graph, const std::filesystem::path& path);

}  // namespace colabel

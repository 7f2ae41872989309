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

#include "colabel/generators.hpp"

#include <cmath>
#include <numbers>
#include <queue>

#include "colabel/error.hpp"
#include "colabel/rng.hpp"

namespace colabel::gen {

namespace {

bool is_connected(const Graph& g) {
  if (g.num_nodes() == 0) return true;
  std::vector<bool> seen(g.num_nodes(), false);
  std::queue<NodeId> q;
  q.push(0);
  seen[0] = true;
  std::size_t count = 1;
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop();
    for (NodeId v : g.neighbors(u)) {
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        q.push(v);
      }
    }
  }
  return count == g.num_nodes();
}

}  // namespace

double standard_normal(CounterRng& rng) {
  double u1 = 0.0;
  do {
    u1 = rng.uniform();
  } while (u1 <= 0.0);
  double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Graph path_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph::from_edges(n, edges);
}

Graph cycle_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return Graph::from_edges(n, edges);
}

Graph complete_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return Graph::from_edges(n, edges);
}

Graph star_graph(std::size_t leaves) {
  std::vector<Edge> edges;
  for (std::size_t i = 1; i <= leaves; ++i) edges.emplace_back(0, i);
  return Graph::from_edges(leaves + 1, edges);
}

Graph random_connected_graph(std::size_t n, double edge_prob, std::uint64_t seed) {
  if (n == 0) throw Error("random_connected_graph needs n >= 1");
  if (!(edge_prob > 0.0 && edge_prob <= 1.0)) throw Error("edge probability must be in (0, 1]");
  for (std::uint64_t attempt = 0; attempt < 10000; ++attempt) {
    CounterRng rng(seed, attempt);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng.uniform() < edge_prob) edges.emplace_back(i, j);
    Graph g = Graph::from_edges(n, edges);
    if (is_connected(g)) return g;
  }
  throw Error("could not sample a connected graph; edge probability too low for n");
}

Graph random_tree(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed, 0x7ee);
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < n; ++i) edges.emplace_back(i, uniform_index(rng, i));
  return Graph::from_edges(n, edges);
}

PlantedPartition planted_partition(std::size_t n, std::size_t blocks, double intra_prob, double inter_prob,
                                   std::uint64_t seed) {
  if (blocks == 0) throw Error("planted_partition needs at least one block");
  PlantedPartition out;
  out.labels.labels.resize(n);
  for (std::size_t v = 0; v < n; ++v) out.labels.labels[v] = static_cast<ClassId>(v % blocks);
  CounterRng rng(seed, 0xb10c);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double p = (i % blocks == j % blocks) ? intra_prob : inter_prob;
      if (rng.uniform() < p) edges.emplace_back(i, j);
    }
  }
  out.graph = Graph::from_edges(n, edges);
  return out;
}

FeatureMatrix class_correlated_features(const LabelAssignment& labels, std::size_t num_classes, std::size_t dims,
                                        double signal, std::uint64_t seed) {
  FeatureMatrix x(labels.size(), dims);
  for (std::size_t v = 0; v < labels.size(); ++v) {
    CounterRng rng(seed, v);
    for (std::size_t d = 0; d < dims; ++d) {
      double mean = 0.0;
      if (labels.labels[v] && d % num_classes == *labels.labels[v]) mean = signal;
      x(v, d) = mean + standard_normal(rng);
    }
  }
  return x;
}

}  // namespace colabel::gen

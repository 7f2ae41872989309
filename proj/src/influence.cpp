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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "colabel/error.hpp"
#include "influence_detail.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace colabel {

namespace {

double log_add(double a, double b) {
  double hi = std::max(a, b);
  double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

ProfileBuilder::ProfileBuilder(const Graph& graph)
    : graph_(&graph), log_degree_(graph.num_nodes()), profile_(graph.num_nodes()) {
  for (NodeId v = 0; v < graph.num_nodes(); ++v) {
    // Degree-0 nodes are never reached from another node, so their entry is unused.
    log_degree_[v] = graph.degree(v) > 0 ? std::log(static_cast<double>(graph.degree(v))) : 0.0;
  }
  order_.reserve(graph.num_nodes());
}

const std::vector<InfluenceProfile>& ProfileBuilder::run(NodeId source) {
  if (source >= graph_->num_nodes()) throw Error("source " + std::to_string(source) + " out of range");
  for (NodeId v : order_) profile_[v] = InfluenceProfile{};
  order_.clear();

  profile_[source] = InfluenceProfile{0, 0.0, 0.0};
  order_.push_back(source);
  // order_ doubles as the BFS queue. Every level-d predecessor of a level-(d+1)
  // node is dequeued before that node, so its values are final when expanded.
  for (std::size_t head = 0; head < order_.size(); ++head) {
    const NodeId u = order_[head];
    const InfluenceProfile pu = profile_[u];
    for (NodeId v : graph_->neighbors(u)) {
      InfluenceProfile& pv = profile_[v];
      if (!pv.reachable()) {
        pv.dist = pu.dist + 1;
        pv.log_path_count = pu.log_path_count;
        pv.min_log_degprod = pu.min_log_degprod + log_degree_[v];
        order_.push_back(v);
      } else if (pv.dist == pu.dist + 1) {
        pv.log_path_count = log_add(pv.log_path_count, pu.log_path_count);
        pv.min_log_degprod = std::min(pv.min_log_degprod, pu.min_log_degprod + log_degree_[v]);
      }
    }
  }
  return profile_;
}

std::vector<InfluenceProfile> shortest_path_profile(const Graph& graph, NodeId source) {
  ProfileBuilder builder(graph);
  return builder.run(source);
}

namespace detail {

ScoreLayout make_score_layout(const Graph& graph, std::span<const NodeId> sources,
                              std::span<const NodeId> unlabeled) {
  if (sources.empty()) throw Error("influence scores need at least one labeled source");
  ScoreLayout layout;
  layout.sources.assign(sources.begin(), sources.end());
  std::sort(layout.sources.begin(), layout.sources.end());
  layout.sources.erase(std::unique(layout.sources.begin(), layout.sources.end()), layout.sources.end());

  std::vector<bool> is_source(graph.num_nodes(), false);
  for (NodeId s : layout.sources) {
    if (s >= graph.num_nodes()) throw Error("source " + std::to_string(s) + " out of range");
    is_source[s] = true;
  }

  std::vector<NodeId> candidates(unlabeled.begin(), unlabeled.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  layout.position.assign(graph.num_nodes(), -1);
  for (NodeId v : candidates) {
    if (v >= graph.num_nodes()) throw Error("candidate " + std::to_string(v) + " out of range");
    if (is_source[v]) throw Error("node " + std::to_string(v) + " is both labeled and a candidate");
    layout.position[v] = static_cast<std::ptrdiff_t>(layout.table.entries.size());
    InfluenceScore entry;
    entry.node = v;
    layout.table.entries.push_back(entry);
  }
  return layout;
}

void fold_profile(const std::vector<InfluenceProfile>& profile, const std::vector<NodeId>& visited,
                  NodeId source, const std::vector<std::ptrdiff_t>& position, std::vector<InfluenceScore>& best) {
  for (NodeId v : visited) {
    std::ptrdiff_t idx = position[v];
    if (idx < 0) continue;
    const InfluenceProfile& p = profile[v];
    double score = p.log_bound();
    InfluenceScore& cur = best[static_cast<std::size_t>(idx)];
    if (improves(score, source, cur)) {
      cur.log_score = score;
      cur.best_source = source;
      cur.dist = p.dist;
    }
  }
}

}  // namespace detail

InfluenceScoreTable influence_scores(const Graph& graph, std::span<const NodeId> sources,
                                     std::span<const NodeId> unlabeled) {
  auto layout = detail::make_score_layout(graph, sources, unlabeled);
  auto& entries = layout.table.entries;
  const auto n_sources = static_cast<std::ptrdiff_t>(layout.sources.size());

#pragma omp parallel
  {
    ProfileBuilder builder(graph);
    std::vector<InfluenceScore> local = entries;
#pragma omp for schedule(dynamic, 4) nowait
    for (std::ptrdiff_t i = 0; i < n_sources; ++i) {
      NodeId s = layout.sources[static_cast<std::size_t>(i)];
      const auto& profile = builder.run(s);
      detail::fold_profile(profile, builder.visited(), s, layout.position, local);
    }
    // The (score, source) order is total, so the merge order does not matter.
#pragma omp critical(colabel_influence_merge)
    for (std::size_t j = 0; j < entries.size(); ++j) {
      const InfluenceScore& cand = local[j];
      if (cand.positive() && detail::improves(cand.log_score, cand.best_source, entries[j])) {
        entries[j] = cand;
      }
    }
  }
  return std::move(layout.table);
}

std::vector<NodeId> complement_nodes(std::size_t n_nodes, std::span<const NodeId> sources) {
  std::vector<bool> excluded(n_nodes, false);
  for (NodeId s : sources) {
    if (s < n_nodes) excluded[s] = true;
  }
  std::vector<NodeId> out;
  for (NodeId v = 0; v < n_nodes; ++v) {
    if (!excluded[v]) out.push_back(v);
  }
  return out;
}

void restrict_to_hops(InfluenceScoreTable& table, std::uint32_t max_hops) {
  for (auto& e : table.entries) {
    if (e.positive() && e.dist > max_hops) e = InfluenceScore{e.node};
  }
}

TopKSelection select_top_k(const InfluenceScoreTable& table, std::size_t k) {
  if (k == 0) throw Error("top-k selection needs k >= 1");
  std::vector<const InfluenceScore*> eligible;
  for (const auto& e : table.entries) {
    if (e.positive()) eligible.push_back(&e);
  }
  auto by_score = [](const InfluenceScore* a, const InfluenceScore* b) {
    if (a->log_score != b->log_score) return a->log_score > b->log_score;
    return a->node < b->node;
  };
  std::size_t take = std::min(k, eligible.size());
  std::partial_sort(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(take), eligible.end(),
                    by_score);

  TopKSelection out;
  for (std::size_t i = 0; i < take; ++i) {
    out.nodes.push_back(eligible[i]->node);
    out.log_scores.push_back(eligible[i]->log_score);
  }
  if (take < k) {
    out.shortfall_warning = "requested top-" + std::to_string(k) + " but only " + std::to_string(take) +
                            " candidates have a positive influence score";
  }
  return out;
}

double brute_force_influence(const Graph& graph, NodeId source, NodeId target, std::size_t hops) {
  const std::size_t n = graph.num_nodes();
  if (n > 200) throw Error("brute_force_influence is limited to graphs with at most 200 nodes");
  if (source >= n || target >= n) throw Error("brute_force_influence: node id out of range");
  std::vector<double> x(n, 0.0), next(n, 0.0);
  x[source] = 1.0;
  for (std::size_t step = 0; step < hops; ++step) {
    for (NodeId i = 0; i < n; ++i) {
      double acc = 0.0;
      for (NodeId j : graph.neighbors(i)) acc += x[j];
      next[i] = graph.degree(i) > 0 ? acc / static_cast<double>(graph.degree(i)) : 0.0;
    }
    x.swap(next);
  }
  return x[target];
}

BoundCheck check_influence_bounds(const Graph& graph, std::span<const NodeId> sources) {
  BoundCheck check;
  ProfileBuilder builder(graph);
  for (NodeId s : sources) {
    const auto& profile = builder.run(s);
    for (NodeId t : builder.visited()) {
      if (t == s) continue;
      double bound = std::exp(profile[t].log_bound());
      double oracle = brute_force_influence(graph, s, t, profile[t].dist);
      check.max_excess = std::max(check.max_excess, oracle - bound);
      check.max_abs_gap = std::max(check.max_abs_gap, std::abs(oracle - bound));
      ++check.pairs;
    }
  }
  return check;
}

void write_scores_csv(const InfluenceScoreTable& table, std::ostream& out) {
  out << "node_id,log_score,best_source,dist\n";
  char buf[64];
  for (const auto& e : table.entries) {
    out << e.node << ',';
    if (e.positive()) {
      std::snprintf(buf, sizeof(buf), "%.17g", e.log_score);
      out << buf << ',' << e.best_source << ',' << e.dist << '\n';
    } else {
      out << "-inf,,\n";
    }
  }
}

std::string selection_to_json(const TopKSelection& selection) {
  return nlohmann::json(selection.nodes).dump() + "\n";
}

std::vector<NodeId> selection_from_json(const std::string& json_text, const std::string& source_name) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source_name, 0, e.what());
  }
  if (!j.is_array()) throw ParseError(source_name, 0, "selection must be a JSON array of node ids");
  std::vector<NodeId> out;
  for (const auto& v : j) {
    if (!v.is_number_unsigned()) throw ParseError(source_name, 0, "selection entries must be node ids");
    out.push_back(v.get<NodeId>());
  }
  return out;
}

}  // namespace colabel

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

#include "colabel/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string_view>

#include "colabel/error.hpp"

namespace colabel {

namespace {

std::optional<std::uint64_t> parse_uint(std::string_view s) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

Graph Graph::from_edges(std::size_t n_nodes, std::span<const Edge> edges) {
  std::vector<Edge> directed;
  directed.reserve(edges.size() * 2);
  for (const auto& [u, v] : edges) {
    if (u >= n_nodes || v >= n_nodes) {
      throw Error("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                  ") references a node id >= " + std::to_string(n_nodes));
    }
    if (u == v) continue;
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  Graph g;
  g.offsets_.assign(n_nodes + 1, 0);
  g.degrees_.assign(n_nodes, 0);
  g.adjacency_.reserve(directed.size());
  for (const auto& [u, v] : directed) {
    ++g.degrees_[u];
    g.adjacency_.push_back(v);
  }
  for (std::size_t v = 0; v < n_nodes; ++v) g.offsets_[v + 1] = g.offsets_[v] + g.degrees_[v];
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  auto nbrs = neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

Graph read_edge_list(std::istream& in, const std::string& source_name) {
  std::optional<std::size_t> declared;
  std::vector<Edge> edges;
  std::uint64_t max_id = 0;
  bool any_content = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (!any_content && view.starts_with("n=")) {
      auto n = parse_uint(view.substr(2));
      if (!n) throw ParseError(source_name, line_no, "malformed header '" + std::string(view) + "'");
      declared = *n;
      any_content = true;
      continue;
    }
    any_content = true;
    auto tab = view.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(source_name, line_no, "expected 'src<TAB>dst', got '" + std::string(view) + "'");
    }
    auto src = parse_uint(trim(view.substr(0, tab)));
    auto dst = parse_uint(trim(view.substr(tab + 1)));
    if (!src || !dst) {
      throw ParseError(source_name, line_no, "non-integer node id in '" + std::string(view) + "'");
    }
    if (*src > UINT32_MAX - 1 || *dst > UINT32_MAX - 1) {
      throw ParseError(source_name, line_no, "node id out of range");
    }
    if (declared && (*src >= *declared || *dst >= *declared)) {
      throw ParseError(source_name, line_no,
                       "node id " + std::to_string(std::max(*src, *dst)) + " >= declared n=" +
                           std::to_string(*declared));
    }
    max_id = std::max({max_id, *src, *dst});
    edges.emplace_back(static_cast<NodeId>(*src), static_cast<NodeId>(*dst));
  }
  if (!any_content) throw ParseError(source_name, 0, "empty edge list");

  std::size_t n = declared ? *declared : static_cast<std::size_t>(max_id) + 1;
  return Graph::from_edges(n, edges);
}

Graph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file " + path.string());
  return read_edge_list(in, path.string());
}

void write_edge_list(const Graph& graph, std::ostream& out) {
  out << "n=" << graph.num_nodes() << '\n';
  for (const auto& [u, v] : graph.edges()) out << u << '\t' << v << '\n';
}

void save_graph(const Graph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write graph file " + path.string());
  write_edge_list(graph, out);
}

}  // namespace colabel

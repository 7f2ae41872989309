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

#include <doctest.h>

#include <numeric>
#include <set>
#include <sstream>

#include "colabel/dataset.hpp"
#include "colabel/error.hpp"
#include "colabel/generators.hpp"
#include "colabel/graph.hpp"

using namespace colabel;

namespace {

Graph parse(const std::string& text) {
  std::istringstream in(text);
  return read_edge_list(in);
}

LabelAssignment labels_of(std::vector<int> raw) {
  LabelAssignment out;
  for (int r : raw) out.labels.push_back(r < 0 ? std::nullopt : std::optional<ClassId>(r));
  return out;
}

}  // namespace

TEST_CASE("load_graph drops self-loops and duplicate directions") {
  Graph g = parse("0\t1\n1\t0\n1\t1\n");
  CHECK(g.num_nodes() == 2);
  CHECK(g.num_edges() == 1);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
  CHECK_FALSE(g.has_edge(1, 1));
}

TEST_CASE("path graph degrees") {
  Graph g = parse("0\t1\n1\t2\n");
  CHECK(std::vector<std::uint32_t>(g.degrees().begin(), g.degrees().end()) == std::vector<std::uint32_t>{1, 2, 1});
}

TEST_CASE("header declares trailing isolated nodes") {
  Graph g = parse("n=4\n0\t1\n");
  CHECK(g.num_nodes() == 4);
  CHECK(g.degree(2) == 0);
  CHECK(g.degree(3) == 0);
}

TEST_CASE("edge list errors carry line numbers") {
  SUBCASE("malformed line") {
    try {
      parse("0\t1\n2 3\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("non-integer") { CHECK_THROWS_AS(parse("0\tx\n"), ParseError); }
  SUBCASE("id beyond header") {
    try {
      parse("n=3\n0\t1\n1\t3\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("empty file") { CHECK_THROWS_AS(parse(""), ParseError); }
  SUBCASE("blank-only file") { CHECK_THROWS_AS(parse("\n\n"), ParseError); }
}

TEST_CASE("graph invariants and edge-list round trip on random graphs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Graph g = gen::random_connected_graph(30, 0.15, seed);
    std::size_t degree_sum = std::accumulate(g.degrees().begin(), g.degrees().end(), std::size_t{0});
    CHECK(degree_sum == 2 * g.num_edges());
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      auto nbrs = g.neighbors(v);
      CHECK(std::is_sorted(nbrs.begin(), nbrs.end()));
      CHECK(std::adjacent_find(nbrs.begin(), nbrs.end()) == nbrs.end());
      CHECK(nbrs.size() == g.degree(v));
      for (NodeId u : nbrs) {
        CHECK(u != v);
        CHECK(g.has_edge(u, v));
      }
    }
    std::ostringstream out;
    write_edge_list(g, out);
    CHECK(parse(out.str()) == g);
  }
}

TEST_CASE("label space validation") {
  CHECK(parse_label_space(R"(["a","b","c"])").index_of("b") == 1u);
  CHECK_THROWS_AS(parse_label_space(R"(["a"])"), ParseError);
  CHECK_THROWS_AS(parse_label_space(R"(["a","a"])"), ParseError);
  CHECK_THROWS_AS(parse_label_space(R"({"a":1})"), ParseError);
}

TEST_CASE("features CSV") {
  std::istringstream in("1,2\n3.5,-4\n0,1e-3\n");
  auto x = read_features(in, 3);
  CHECK(x.rows() == 3);
  CHECK(x.cols() == 2);
  CHECK(x(1, 1) == -4.0);

  std::istringstream bad_rows("1,2\n");
  CHECK_THROWS_AS(read_features(bad_rows, 3), ParseError);
  std::istringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(read_features(ragged, 2), ParseError);
  std::istringstream nan_value("1,nan\n");
  CHECK_THROWS_AS(read_features(nan_value, 1), ParseError);
}

TEST_CASE("labels CSV") {
  LabelSpace space({"Theory", "Neural_Networks"});
  std::istringstream in("node_id,class_name\n0,Theory\n2,Neural_Networks\n");
  auto labels = read_labels(in, space, 3);
  CHECK(labels.at(0) == 0u);
  CHECK_FALSE(labels.known(1));
  CHECK(labels.at(2) == 1u);

  std::istringstream unknown("0,Banana\n");
  try {
    read_labels(unknown, space, 3);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("Banana") != std::string::npos);
  }
  std::istringstream out_of_range("5,Theory\n");
  CHECK_THROWS_AS(read_labels(out_of_range, space, 3), ParseError);
}

TEST_CASE("texts JSON lines default missing nodes to empty with a warning") {
  std::istringstream in(R"({"node_id": 0, "text": "graph neural"}
{"node_id": 2, "text": ""}
)");
  auto corpus = read_texts(in, 6);
  CHECK(corpus.texts[0] == "graph neural");
  CHECK(corpus.texts[5].empty());
  CHECK(corpus.warnings.size() == 4);  // nodes 1, 3, 4, 5
  bool mentions_five = false;
  for (const auto& w : corpus.warnings) mentions_five |= w.find("node 5 ") != std::string::npos;
  CHECK(mentions_five);

  std::istringstream bad(R"({"node_id": 9, "text": "x"})");
  CHECK_THROWS_AS(read_texts(bad, 3), ParseError);
}

TEST_CASE("few-shot split") {
  LabelAssignment labels;
  for (int v = 0; v < 70; ++v) labels.labels.push_back(static_cast<ClassId>(v % 7));

  SUBCASE("k per class") {
    Split s = make_few_shot_split(labels, 7, 3, 10, 42);
    CHECK(s.train.size() == 21);
    CHECK(s.val.size() == 10);
    CHECK(s.test.size() == 70 - 31);
    CHECK_NOTHROW(validate_split(s, labels, 7));
  }
  SUBCASE("deterministic per seed, sensitive to seed") {
    CHECK(make_few_shot_split(labels, 7, 3, 10, 42) == make_few_shot_split(labels, 7, 3, 10, 42));
    CHECK(split_to_json(make_few_shot_split(labels, 7, 3, 10, 42)) ==
          split_to_json(make_few_shot_split(labels, 7, 3, 10, 42)));
    CHECK_FALSE(make_few_shot_split(labels, 7, 3, 10, 42) == make_few_shot_split(labels, 7, 3, 10, 43));
  }
  SUBCASE("class with too few labeled nodes") {
    auto small = labels_of({0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 2, 2, 2, 2});
    CHECK_THROWS_AS(make_few_shot_split(small, 3, 5, 0, 1), Error);
  }
  SUBCASE("val too large") { CHECK_THROWS_AS(make_few_shot_split(labels, 7, 3, 60, 1), Error); }
  SUBCASE("unknown labels never sampled") {
    auto partial = labels_of({0, -1, 1, -1, 0, 1, 0, 1});
    Split s = make_few_shot_split(partial, 2, 2, 1, 3);
    std::set<NodeId> all(s.train.begin(), s.train.end());
    all.insert(s.val.begin(), s.val.end());
    all.insert(s.test.begin(), s.test.end());
    CHECK(all.count(1) == 0);
    CHECK(all.count(3) == 0);
    CHECK(all.size() == 6);
  }
  SUBCASE("JSON round trip") {
    Split s = make_few_shot_split(labels, 7, 2, 5, 9);
    CHECK(split_from_json(split_to_json(s)) == s);
    Split no_shots = split_from_json(R"({"train":[1],"val":[],"test":[2]})");
    CHECK(no_shots.train == std::vector<NodeId>{1});
  }
}

TEST_CASE("validate_split rejects overlap") {
  auto labels = labels_of({0, 1, 0, 1});
  Split s{{0, 1}, {1}, {2, 3}, 1};
  CHECK_THROWS_AS(validate_split(s, labels, 2), Error);
}

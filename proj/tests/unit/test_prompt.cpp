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

#include "colabel/error.hpp"
#include "colabel/prompt.hpp"

using namespace colabel;

namespace {

LabelSpace cora() {
  return LabelSpace({"Case_Based", "Genetic_Algorithms", "Neural_Networks", "Probabilistic_Methods",
                     "Reinforcement_Learning", "Rule_Learning", "Theory"});
}

}  // namespace

TEST_CASE("cora template renders the published prompt") {
  const std::string got = render_prompt(builtin_template("cora"), "Learning to walk with deep nets.", cora());
  CHECK(got.rfind("Given a node-centered graph with centric node description:", 0) == 0);
  CHECK(got ==
        "Given a node-centered graph with centric node description: Learning to walk with deep nets., each node "
        "represents a paper, we need to classify the center node into 7 classes: Case_Based, Genetic_Algorithms, "
        "Neural_Networks, Probabilistic_Methods, Reinforcement_Learning, Rule_Learning, Theory, please tell me "
        "which class the center node belongs to?");
}

TEST_CASE("every builtin template renders every class name") {
  auto space = cora();
  for (const auto& name : builtin_template_names()) {
    auto s = render_prompt(builtin_template(name), "text", space);
    for (const auto& c : space.names()) CHECK(s.find(c) != std::string::npos);
    CHECK(s.find('{') == std::string::npos);
  }
  CHECK_THROWS_AS(builtin_template("wikipedia"), Error);
}

TEST_CASE("empty text and label order") {
  auto s = render_prompt(builtin_template("generic"), "", LabelSpace({"A", "B"}));
  CHECK(s.find("description: , we need") != std::string::npos);
  auto ab = render_prompt(builtin_template("generic"), "x", LabelSpace({"A", "B"}));
  auto ba = render_prompt(builtin_template("generic"), "x", LabelSpace({"B", "A"}));
  CHECK(ab.find("classes: A, B,") != std::string::npos);
  CHECK(ba.find("classes: B, A,") != std::string::npos);
}

TEST_CASE("custom templates") {
  PromptTemplate t{"mine", "Text: {raw_text} | {num_classes} | {labels} | {not a field} {}"};
  CHECK(render_prompt(t, "hi", LabelSpace({"A", "B"})) == "Text: hi | 2 | A, B | {not a field} {}");
  PromptTemplate bad{"bad", "Text: {raw_text} {graph}"};
  CHECK_THROWS_WITH_AS(render_prompt(bad, "hi", LabelSpace({"A", "B"})), doctest::Contains("{graph}"), Error);
  // Substituted text is not re-scanned.
  CHECK(render_prompt(t, "{labels}", LabelSpace({"A", "B"})).rfind("Text: {labels} |", 0) == 0);
}

TEST_CASE("parse_llm_label") {
  auto space = cora();
  CHECK(parse_llm_label("neural_networks.", space) == 2u);
  CHECK(parse_llm_label("Neural_Networks", space) == 2u);
  CHECK(parse_llm_label("  THEORY!\n", space) == 6u);
  CHECK(parse_llm_label("neural networks", space) == 2u);
  CHECK(parse_llm_label("The center node belongs to Rule_Learning.", space) == 5u);
  CHECK_FALSE(parse_llm_label("", space).has_value());
  CHECK_FALSE(parse_llm_label("banana", space).has_value());
  CHECK_FALSE(parse_llm_label("Theory or Neural_Networks", space).has_value());

  LabelSpace cs({"Agents", "ML", "IR", "DB", "HCI", "AI"});
  CHECK_FALSE(parse_llm_label("It is either DB or IR", cs).has_value());
  CHECK(parse_llm_label("db", cs) == 3u);
  // Whole words only: "their" does not mention IR, "explain" does not mention AI.
  CHECK(parse_llm_label("I would explain their work as DB", cs) == 3u);

  LabelSpace pub({"Experimentally induced diabetes", "Type 1 diabetes", "Type 2 diabetes"});
  CHECK(parse_llm_label("This is about type 2 diabetes", pub) == 2u);
  LabelSpace nested({"diabetes", "Type 1 diabetes"});
  CHECK(parse_llm_label("Type 1 diabetes, clearly", nested) == 1u);

  LabelSpace paren({"ML (Machine Learning)", "IR (Information Retrieval)"});
  CHECK(parse_llm_label("ML (Machine Learning)", paren) == 0u);
  CHECK(parse_llm_label("answer: ir (information retrieval)", paren) == 1u);
}

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

#include "colabel/prompt.hpp"

#include <algorithm>
#include <cctype>

#include "colabel/error.hpp"

namespace colabel {

namespace {

constexpr std::string_view kHead = "Given a node-centered graph with centric node description: {raw_text}, ";
constexpr std::string_view kTail = ", please tell me which class the center node belongs to?";

std::string make(std::string_view middle) {
  std::string s(kHead);
  s += middle;
  s += kTail;
  return s;
}

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Calls on_text for literal runs and on_field for each {identifier}.
template <class Text, class Field>
void scan(std::string_view t, Text on_text, Field on_field) {
  std::size_t i = 0;
  while (i < t.size()) {
    const auto open = t.find('{', i);
    if (open == std::string_view::npos) break;
    auto close = open + 1;
    while (close < t.size() && ident_char(t[close])) ++close;
    if (close < t.size() && t[close] == '}' && close > open + 1) {
      on_text(t.substr(i, open - i));
      on_field(t.substr(open + 1, close - open - 1));
      i = close + 1;
    } else {
      on_text(t.substr(i, open + 1 - i));
      i = open + 1;
    }
  }
  on_text(t.substr(std::min(i, t.size())));
}

std::string normalize(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '_') c = ' ';
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

bool trim_char(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || (std::ispunct(static_cast<unsigned char>(c)) && c != '_');
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && trim_char(s.front())) s.remove_prefix(1);
  while (!s.empty() && trim_char(s.back())) s.remove_suffix(1);
  return s;
}

bool word_edge(std::string_view hay, std::size_t pos) {
  return pos >= hay.size() || !std::isalnum(static_cast<unsigned char>(hay[pos]));
}

bool contains_word(std::string_view hay, std::string_view needle) {
  if (needle.empty()) return false;
  for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + 1)) {
    const bool left = pos == 0 || word_edge(hay, pos - 1);
    if (left && word_edge(hay, pos + needle.size())) return true;
  }
  return false;
}

}  // namespace

PromptTemplate builtin_template(std::string_view name) {
  if (name == "cora" || name == "citeseer")
    return {std::string(name), make("each node represents a paper, we need to classify the center node into "
                                    "{num_classes} classes: {labels}")};
  if (name == "pubmed")
    return {"pubmed", make("each node represents a paper about Diabetes, we need to classify the center node into "
                           "{num_classes} classes: {labels}")};
  if (name == "arxiv")
    return {"arxiv", make("we need to classify the center node into {num_classes} arXiv CS sub-categories: {labels}")};
  if (name == "products")
    return {"products", make("each node represents a product, we need to classify the center node into {num_classes} "
                             "classes: {labels}")};
  if (name == "generic")
    return {"generic", make("we need to classify the center node into {num_classes} classes: {labels}")};
  throw Error("unknown prompt template '" + std::string(name) + "'");
}

std::vector<std::string> builtin_template_names() {
  return {"arxiv", "citeseer", "cora", "generic", "products", "pubmed"};
}

void check_template(const PromptTemplate& tpl) {
  scan(
      tpl.text, [](std::string_view) {},
      [&](std::string_view field) {
        if (field != "raw_text" && field != "num_classes" && field != "labels")
          throw Error("template '" + tpl.name + "' has unresolved placeholder {" + std::string(field) + "}");
      });
}

std::string render_prompt(const PromptTemplate& tpl, std::string_view raw_text, const LabelSpace& space) {
  check_template(tpl);
  std::string labels;
  for (std::size_t c = 0; c < space.size(); ++c) {
    if (c) labels += ", ";
    labels += space.name(static_cast<ClassId>(c));
  }
  std::string out;
  scan(
      tpl.text, [&](std::string_view s) { out += s; },
      [&](std::string_view field) {
        if (field == "raw_text") out += raw_text;
        else if (field == "num_classes") out += std::to_string(space.size());
        else out += labels;
      });
  return out;
}

std::optional<ClassId> parse_llm_label(std::string_view raw, const LabelSpace& space) {
  const std::string text = normalize(trim(raw));
  if (text.empty()) return std::nullopt;
  std::vector<std::string> names;
  for (const auto& n : space.names()) names.push_back(normalize(trim(n)));
  for (std::size_t c = 0; c < names.size(); ++c)
    if (names[c] == text) return static_cast<ClassId>(c);

  std::vector<std::size_t> hits;
  for (std::size_t c = 0; c < names.size(); ++c)
    if (contains_word(text, names[c])) hits.push_back(c);
  // "Type 1 diabetes" should not also count as a mention of "diabetes".
  std::vector<std::size_t> kept;
  for (auto c : hits) {
    const bool inside_other = std::any_of(hits.begin(), hits.end(), [&](std::size_t d) {
      return d != c && names[d].size() > names[c].size() && contains_word(names[d], names[c]);
    });
    if (!inside_other) kept.push_back(c);
  }
  if (kept.size() != 1) return std::nullopt;
  return static_cast<ClassId>(kept.front());
}

}  // namespace colabel

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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "colabel/dataset.hpp"

namespace colabel {

// Template text with {raw_text}, {num_classes} and {labels} placeholders.
// Braces not forming {identifier} are copied literally.
struct PromptTemplate {
  std::string name;
  std::string text;
};

// cora, citeseer, pubmed, arxiv, products, generic.
PromptTemplate builtin_template(std::string_view name);
std::vector<std::string> builtin_template_names();

// Throws on any {identifier} that is not a known placeholder.
void check_template(const PromptTemplate& tpl);

// Labels are rendered comma-separated in label-space order.
std::string render_prompt(const PromptTemplate& tpl, std::string_view raw_text, const LabelSpace& space);

// Case-insensitive; underscores count as spaces. After trimming whitespace and
// punctuation an exact class name wins. Otherwise the class whose name occurs
// as a whole word sequence must be unique (names contained in another matched
// name are ignored). nullopt means unparsed.
std::optional<ClassId> parse_llm_label(std::string_view raw, const LabelSpace& space);

}  // namespace colabel

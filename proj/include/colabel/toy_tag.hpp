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
#include <filesystem>
#include <string>
#include <vector>

#include "colabel/dataset.hpp"
#include "colabel/graph.hpp"
#include "colabel/matrix.hpp"

namespace colabel {

// Small text-attributed citation graph: planted-partition structure, short
// keyword documents per class, bag-of-words features, and the raw output of a
// keyword-voting stand-in for the text predictor (including messy and
// unusable answers).
struct ToyTag {
  Graph graph;
  LabelSpace space;
  LabelAssignment labels;
  std::vector<std::string> texts;
  FeatureMatrix features;
  std::vector<std::string> llm_raw;  // one answer per node
};

struct ToyTagOptions {
  std::size_t n = 300;
  double intra_prob = 0.04;
  double inter_prob = 0.004;
  std::uint64_t seed = 7;
};

// Three classes: Neural_Networks, Reinforcement_Learning, Theory.
ToyTag make_toy_tag(const ToyTagOptions& options = {});

// graph.tsv, features.csv, labels.csv, label_space.json, texts.jsonl,
// llm_predictions.jsonl.
void write_toy_tag(const ToyTag& tag, const std::filesystem::path& dir);

}  // namespace colabel

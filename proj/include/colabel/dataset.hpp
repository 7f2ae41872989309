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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "colabel/graph.hpp"
#include "colabel/matrix.hpp"

namespace colabel {

using ClassId = std::uint32_t;

// Ordered, duplicate-free class names; position defines the class index.
class LabelSpace {
 public:
  LabelSpace() = default;
  explicit LabelSpace(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(ClassId c) const { return names_.at(c); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<ClassId> index_of(std::string_view name) const;

  bool operator==(const LabelSpace&) const = default;

 private:
  std::vector<std::string> names_;
};

// Per-node class index, nullopt when unknown.
struct LabelAssignment {
  std::vector<std::optional<ClassId>> labels;

  std::size_t size() const noexcept { return labels.size(); }
  bool known(NodeId v) const { return labels.at(v).has_value(); }
  ClassId at(NodeId v) const { return labels.at(v).value(); }
};

struct TextCorpus {
  std::vector<std::string> texts;
  // One entry per node that had no text record.
  std::vector<std::string> warnings;
  std::vector<NodeId> missing;  // ascending
};

struct Split {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
  std::size_t shots = 0;

  bool operator==(const Split&) const = default;
};

LabelSpace parse_label_space(std::string_view json_text, const std::string& source_name = "<label space>");
LabelSpace load_label_space(const std::filesystem::path& path);

// CSV, one row per node, comma separated decimals. Row count must equal n_nodes.
FeatureMatrix read_features(std::istream& in, std::size_t n_nodes,
                            const std::string& source_name = "<features>");
FeatureMatrix load_features(const std::filesystem::path& path, std::size_t n_nodes);

// CSV "node_id,class_name"; an optional "node_id,class_name" header is skipped.
LabelAssignment read_labels(std::istream& in, const LabelSpace& space, std::size_t n_nodes,
                            const std::string& source_name = "<labels>");
LabelAssignment load_labels(const std::filesystem::path& path, const LabelSpace& space,
                            std::size_t n_nodes);
void write_labels(const LabelAssignment& labels, const LabelSpace& space, std::ostream& out);

// JSON lines {"node_id": int, "text": string}. Nodes without a record get "".
TextCorpus read_texts(std::istream& in, std::size_t n_nodes, const std::string& source_name = "<texts>");
TextCorpus load_texts(const std::filesystem::path& path, std::size_t n_nodes);

// Samples k labeled nodes per class uniformly without replacement into train,
// then val_size of the remaining labeled nodes into val; the rest of the
// labeled nodes form test. Each list is returned sorted.
Split make_few_shot_split(const LabelAssignment& labels, std::size_t num_classes, std::size_t shots,
                          std::size_t val_size, std::uint64_t seed);

// Checks disjointness, id range and k-per-class.
void validate_split(const Split& split, const LabelAssignment& labels, std::size_t num_classes);

std::string split_to_json(const Split& split);
Split split_from_json(std::string_view json_text, const std::string& source_name = "<split>");
Split load_split(const std::filesystem::path& path);
void save_split(const Split& split, const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace colabel

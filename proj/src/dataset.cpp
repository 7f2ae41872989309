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

#include "colabel/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "colabel/error.hpp"
#include "colabel/rng.hpp"

namespace colabel {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<std::uint64_t> parse_uint(std::string_view s) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::ifstream open_input(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw Error(std::string("cannot open ") + what + " file " + path.string());
  return in;
}

std::vector<NodeId> node_list(const json& j, const char* key, const std::string& source) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw ParseError(source, 0, std::string("missing array '") + key + "'");
  }
  std::vector<NodeId> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number_unsigned()) throw ParseError(source, 0, std::string("non-integer id in '") + key + "'");
    out.push_back(v.get<NodeId>());
  }
  return out;
}

}  // namespace

LabelSpace::LabelSpace(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() < 2) throw Error("label space needs at least 2 classes");
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw Error("label space contains an empty class name");
    if (!seen.insert(n).second) throw Error("duplicate class name '" + n + "' in label space");
  }
}

std::optional<ClassId> LabelSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<ClassId>(i);
  }
  return std::nullopt;
}

LabelSpace parse_label_space(std::string_view json_text, const std::string& source_name) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(source_name, 0, e.what());
  }
  if (!j.is_array()) throw ParseError(source_name, 0, "label space must be a JSON array of strings");
  std::vector<std::string> names;
  for (const auto& v : j) {
    if (!v.is_string()) throw ParseError(source_name, 0, "label space entries must be strings");
    names.push_back(v.get<std::string>());
  }
  try {
    return LabelSpace(std::move(names));
  } catch (const Error& e) {
    throw ParseError(source_name, 0, e.what());
  }
}

LabelSpace load_label_space(const std::filesystem::path& path) {
  return parse_label_space(read_file(path), path.string());
}

FeatureMatrix read_features(std::istream& in, std::size_t n_nodes, const std::string& source_name) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    std::size_t row_cols = 0;
    while (true) {
      auto comma = view.find(',');
      std::string_view cell = trim(view.substr(0, comma));
      double x = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ParseError(source_name, line_no, "malformed number '" + std::string(cell) + "'");
      }
      if (!std::isfinite(x)) throw ParseError(source_name, line_no, "non-finite feature value");
      values.push_back(x);
      ++row_cols;
      if (comma == std::string_view::npos) break;
      view.remove_prefix(comma + 1);
    }
    if (rows == 0) {
      cols = row_cols;
    } else if (row_cols != cols) {
      throw ParseError(source_name, line_no,
                       "expected " + std::to_string(cols) + " columns, got " + std::to_string(row_cols));
    }
    ++rows;
  }
  if (rows != n_nodes) {
    throw ParseError(source_name, 0,
                     "feature rows (" + std::to_string(rows) + ") != graph nodes (" + std::to_string(n_nodes) + ")");
  }
  FeatureMatrix m(rows, cols);
  std::copy(values.begin(), values.end(), m.values().begin());
  return m;
}

FeatureMatrix load_features(const std::filesystem::path& path, std::size_t n_nodes) {
  auto in = open_input(path, "features");
  return read_features(in, n_nodes, path.string());
}

LabelAssignment read_labels(std::istream& in, const LabelSpace& space, std::size_t n_nodes,
                            const std::string& source_name) {
  LabelAssignment out;
  out.labels.assign(n_nodes, std::nullopt);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    auto comma = view.find(',');
    if (comma == std::string_view::npos) {
      throw ParseError(source_name, line_no, "expected 'node_id,class_name'");
    }
    std::string_view id_part = trim(view.substr(0, comma));
    std::string_view name = trim(view.substr(comma + 1));
    auto id = parse_uint(id_part);
    if (!id) {
      if (line_no == 1 && id_part == "node_id") continue;
      throw ParseError(source_name, line_no, "non-integer node id '" + std::string(id_part) + "'");
    }
    if (*id >= n_nodes) {
      throw ParseError(source_name, line_no, "node id " + std::to_string(*id) + " >= " + std::to_string(n_nodes));
    }
    auto cls = space.index_of(name);
    if (!cls) throw ParseError(source_name, line_no, "unknown class name '" + std::string(name) + "'");
    if (out.labels[*id]) throw ParseError(source_name, line_no, "duplicate label for node " + std::to_string(*id));
    out.labels[*id] = *cls;
  }
  return out;
}

LabelAssignment load_labels(const std::filesystem::path& path, const LabelSpace& space, std::size_t n_nodes) {
  auto in = open_input(path, "labels");
  return read_labels(in, space, n_nodes, path.string());
}

void write_labels(const LabelAssignment& labels, const LabelSpace& space, std::ostream& out) {
  out << "node_id,class_name\n";
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (labels.labels[v]) out << v << ',' << space.name(*labels.labels[v]) << '\n';
  }
}

TextCorpus read_texts(std::istream& in, std::size_t n_nodes, const std::string& source_name) {
  TextCorpus corpus;
  corpus.texts.assign(n_nodes, std::string());
  std::vector<bool> seen(n_nodes, false);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source_name, line_no, e.what());
    }
    if (!j.is_object() || !j.contains("node_id") || !j.at("node_id").is_number_unsigned() ||
        !j.contains("text") || !j.at("text").is_string()) {
      throw ParseError(source_name, line_no, "expected {\"node_id\": int, \"text\": string}");
    }
    auto id = j.at("node_id").get<std::uint64_t>();
    if (id >= n_nodes) {
      throw ParseError(source_name, line_no, "node id " + std::to_string(id) + " >= " + std::to_string(n_nodes));
    }
    corpus.texts[id] = j.at("text").get<std::string>();
    seen[id] = true;
  }
  for (std::size_t v = 0; v < n_nodes; ++v) {
    if (seen[v]) continue;
    corpus.warnings.push_back("node " + std::to_string(v) + " has no text; using empty string");
    corpus.missing.push_back(static_cast<NodeId>(v));
  }
  return corpus;
}

TextCorpus load_texts(const std::filesystem::path& path, std::size_t n_nodes) {
  auto in = open_input(path, "texts");
  return read_texts(in, n_nodes, path.string());
}

Split make_few_shot_split(const LabelAssignment& labels, std::size_t num_classes, std::size_t shots,
                          std::size_t val_size, std::uint64_t seed) {
  if (shots == 0) throw Error("shots must be >= 1");
  std::vector<std::vector<NodeId>> by_class(num_classes);
  for (NodeId v = 0; v < labels.size(); ++v) {
    if (!labels.labels[v]) continue;
    ClassId c = *labels.labels[v];
    if (c >= num_classes) throw Error("label " + std::to_string(c) + " out of range for node " + std::to_string(v));
    by_class[c].push_back(v);
  }

  CounterRng rng(seed, 0x5eed5);
  auto partial_shuffle = [&rng](std::vector<NodeId>& pool, std::size_t take) {
    for (std::size_t i = 0; i < take; ++i) {
      std::size_t j = i + uniform_index(rng, pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
  };

  Split split;
  split.shots = shots;
  std::vector<bool> in_train(labels.size(), false);
  for (std::size_t c = 0; c < num_classes; ++c) {
    auto& pool = by_class[c];
    if (pool.size() < shots) {
      throw Error("class " + std::to_string(c) + " has " + std::to_string(pool.size()) +
                  " labeled nodes, fewer than shots=" + std::to_string(shots));
    }
    partial_shuffle(pool, shots);
    for (std::size_t i = 0; i < shots; ++i) {
      split.train.push_back(pool[i]);
      in_train[pool[i]] = true;
    }
  }

  std::vector<NodeId> rest;
  for (NodeId v = 0; v < labels.size(); ++v) {
    if (labels.labels[v] && !in_train[v]) rest.push_back(v);
  }
  if (val_size > rest.size()) {
    throw Error("val_size=" + std::to_string(val_size) + " exceeds the " + std::to_string(rest.size()) +
                " labeled nodes left after sampling train");
  }
  partial_shuffle(rest, val_size);
  split.val.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(val_size));
  split.test.assign(rest.begin() + static_cast<std::ptrdiff_t>(val_size), rest.end());

  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

void validate_split(const Split& split, const LabelAssignment& labels, std::size_t num_classes) {
  std::vector<int> owner(labels.size(), -1);
  const std::vector<NodeId>* parts[] = {&split.train, &split.val, &split.test};
  for (int p = 0; p < 3; ++p) {
    for (NodeId v : *parts[p]) {
      if (v >= labels.size()) throw Error("split node id " + std::to_string(v) + " out of range");
      if (owner[v] != -1) throw Error("node " + std::to_string(v) + " appears in more than one split part");
      owner[v] = p;
    }
  }
  std::vector<std::size_t> per_class(num_classes, 0);
  for (NodeId v : split.train) {
    if (!labels.labels[v]) throw Error("train node " + std::to_string(v) + " has no label");
    ++per_class.at(*labels.labels[v]);
  }
  if (split.shots > 0) {
    for (std::size_t c = 0; c < num_classes; ++c) {
      if (per_class[c] != split.shots) {
        throw Error("train has " + std::to_string(per_class[c]) + " nodes of class " + std::to_string(c) +
                    ", expected " + std::to_string(split.shots));
      }
    }
  }
}

std::string split_to_json(const Split& split) {
  json j;
  j["train"] = split.train;
  j["val"] = split.val;
  j["test"] = split.test;
  j["shots"] = split.shots;
  return j.dump() + "\n";
}

Split split_from_json(std::string_view json_text, const std::string& source_name) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(source_name, 0, e.what());
  }
  if (!j.is_object()) throw ParseError(source_name, 0, "split must be a JSON object");
  Split split;
  split.train = node_list(j, "train", source_name);
  split.val = node_list(j, "val", source_name);
  split.test = node_list(j, "test", source_name);
  if (j.contains("shots")) split.shots = j.at("shots").get<std::size_t>();
  return split;
}

Split load_split(const std::filesystem::path& path) { return split_from_json(read_file(path), path.string()); }

void save_split(const Split& split, const std::filesystem::path& path) { write_file(path, split_to_json(split)); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace colabel

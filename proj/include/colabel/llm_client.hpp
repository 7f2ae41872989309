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

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colabel/agreement.hpp"
#include "colabel/dataset.hpp"

namespace colabel {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

// Raw text-predictor output per node; nullopt when the node was never asked
// or every attempt failed.
struct LlmAnnotations {
  std::vector<std::optional<std::string>> raw;

  // Parsed labels. Nodes with no raw output are missing; outputs that name
  // no single class are unparsed.
  PredictionSet parse(const LabelSpace& space) const;
};

// JSON lines {"node_id": int, "label": string}. Duplicate ids are an error.
LlmAnnotations read_llm_predictions(std::istream& in, std::size_t n_nodes,
                                    const std::string& source_name = "<llm predictions>");
LlmAnnotations load_llm_predictions(const std::filesystem::path& path, std::size_t n_nodes);

// JSON lines {"node_id", "raw", "label"} for every node in `nodes`; label is
// the parsed class name or null.
std::string annotations_to_jsonl(const LlmAnnotations& ann, std::span<const NodeId> nodes, const LabelSpace& space);
LlmAnnotations annotations_from_jsonl(std::istream& in, std::size_t n_nodes,
                                      const std::string& source_name = "<annotations>");

struct FetchOptions {
  std::size_t concurrency = 4;
  std::size_t max_attempts = 5;
  std::chrono::milliseconds initial_backoff{200};
  double backoff_factor = 2.0;
  std::chrono::milliseconds timeout{30000};
  // Replay file: JSON lines {"prompt_sha256", "label"}. Hits skip the network
  // and new successes are appended.
  std::optional<std::filesystem::path> cache;

  void validate() const;
};

struct FetchOutcome {
  std::vector<std::optional<std::string>> labels;  // per prompt, input order
  std::vector<std::string> errors;                 // per prompt, empty on success
  std::size_t cache_hits = 0;
  std::size_t requests = 0;                        // HTTP attempts made
};

// POSTs {"prompt": ...} to endpoint_url and reads {"label": ...}. 5xx, 429
// and transport errors are retried with exponential backoff; other statuses
// and malformed bodies fail the prompt at once.
FetchOutcome fetch_llm_labels(const std::string& endpoint_url, std::span<const std::string> prompts,
                              const FetchOptions& options);

// Asks about each node in `nodes` (prompts[i] belongs to nodes[i]).
LlmAnnotations fetch_llm_predictions(const std::string& endpoint_url, std::span<const NodeId> nodes,
                                     std::span<const std::string> prompts, std::size_t n_nodes,
                                     const FetchOptions& options, std::vector<std::string>* warnings = nullptr);

}  // namespace colabel

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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "colabel/agreement.hpp"
#include "colabel/dataset.hpp"
#include "colabel/error.hpp"
#include "colabel/graph.hpp"
#include "colabel/influence.hpp"
#include "colabel/judge.hpp"
#include "colabel/llm_client.hpp"
#include "colabel/prompt.hpp"

namespace colabel {

// Error raised inside a pipeline stage; what() reads "[stage] message".
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error("[" + stage + "] " + message), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct PipelineConfig {
  std::filesystem::path graph;
  std::filesystem::path features;
  std::filesystem::path labels;
  std::filesystem::path label_space;
  std::filesystem::path texts;

  std::size_t shots = 3;
  std::uint64_t seed = 0;
  std::size_t top_k = 1500;
  double tau = 0.7;
  double lambda = 0.1;  // recorded for the downstream tuner
  JudgeHyper judge;
  std::optional<std::size_t> val_size;         // default: min(500, remaining labeled / 5)
  std::optional<std::uint32_t> subgraph_hops;  // drop candidates farther than this from every train node

  std::optional<std::filesystem::path> llm_predictions;
  std::optional<std::string> endpoint;
  FetchOptions fetch;

  std::string template_name = "generic";
  std::optional<std::filesystem::path> template_file;  // overrides template_name
  bool strict = false;

  std::filesystem::path out_dir;

  void validate() const;
  // Canonical JSON of every field except out_dir.
  std::string canonical_json() const;
  std::string hash() const;
};

// Replaces config.seed with COLABEL_SEED when that variable is set.
void apply_seed_override(PipelineConfig& config);

struct PipelineInputs {
  Graph graph;
  FeatureMatrix features;
  LabelSpace space;
  LabelAssignment labels;
  TextCorpus texts;
  PromptTemplate prompt;
};

PipelineInputs load_inputs(const PipelineConfig& config);
PromptTemplate resolve_template(const PipelineConfig& config);

std::size_t default_val_size(const LabelAssignment& labels, std::size_t num_classes, std::size_t shots);
Split run_split_stage(const PipelineInputs& in, const PipelineConfig& config);

struct JudgeOutput {
  JudgeModel model;
  ProbMatrix probs;
};
JudgeOutput run_judge_stage(const PipelineInputs& in, const Split& split, const PipelineConfig& config);

struct SelectOutput {
  InfluenceScoreTable scores;
  TopKSelection selection;
};
SelectOutput run_select_stage(const Graph& graph, const Split& split, const PipelineConfig& config);

std::vector<std::string> render_prompts(std::span<const NodeId> nodes, const PipelineInputs& in);

// Text-predictor outputs for the selected nodes, from the predictions file or the endpoint.
LlmAnnotations run_annotate_stage(const PipelineInputs& in, std::span<const NodeId> selected,
                                  const PipelineConfig& config, std::vector<std::string>& warnings);

PartitionResult run_partition_stage(const ProbMatrix& probs, const LlmAnnotations& annotations,
                                    const LabelSpace& space, std::span<const NodeId> selected, double tau);

// JSON lines sorted by node id. Nodes without text get an empty description
// and a warning, or an error under strict mode.
struct EmittedFile {
  std::string jsonl;
  std::size_t records = 0;
};
EmittedFile emit_instruction_dataset(const PartitionResult& partition, const PredictionSet& gnn,
                                     const PipelineInputs& in, bool strict, std::vector<std::string>& warnings);
EmittedFile emit_preference_dataset(const PartitionResult& partition, const PipelineInputs& in, bool strict,
                                    std::vector<std::string>& warnings);

namespace artifact {
inline constexpr const char* kSplit = "split.json";
inline constexpr const char* kJudge = "judge.json";
inline constexpr const char* kProbs = "probs.csv";
inline constexpr const char* kScores = "scores.csv";
inline constexpr const char* kSelected = "selected.json";
inline constexpr const char* kAnnotations = "annotations.jsonl";
inline constexpr const char* kPartition = "partition.json";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kInstruct = "instruct.jsonl";
inline constexpr const char* kPrefs = "prefs.jsonl";
inline constexpr const char* kManifest = "manifest.json";
}  // namespace artifact

struct ManifestCounts {
  std::size_t nodes = 0;
  std::size_t train = 0;
  std::size_t selected = 0;
  std::size_t agreed = 0;
  std::size_t disagreed = 0;
  std::size_t unparsed = 0;
  std::size_t filtered_disagreed = 0;
  std::size_t instruct = 0;
  std::size_t prefs = 0;
};

// files: artifact name -> contents; only the SHA-256 of each is recorded.
std::string build_manifest(const PipelineConfig& config, const ManifestCounts& counts,
                           const std::map<std::string, std::string>& files);

struct RunSummary {
  ManifestCounts counts;
  std::vector<std::string> warnings;
  std::string config_hash;
};

// Runs every stage and writes the artifacts into config.out_dir. Files are
// staged first and moved into place only when every stage succeeded.
RunSummary run_pipeline(const PipelineConfig& config);

}  // namespace colabel

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

#include "colabel/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "colabel/error.hpp"

namespace colabel {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json opt_path(const std::optional<fs::path>& p) { return p ? json(p->generic_string()) : json(nullptr); }

std::string id_list(std::span<const NodeId> ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(ids[i]);
  }
  return out;
}

std::vector<NodeId> sorted(std::span<const NodeId> nodes) {
  std::vector<NodeId> out(nodes.begin(), nodes.end());
  std::sort(out.begin(), out.end());
  return out;
}

// Renders the prompt for v and notes whether its text was missing.
std::string prompt_for(NodeId v, const PipelineInputs& in, std::vector<NodeId>& textless) {
  if (std::binary_search(in.texts.missing.begin(), in.texts.missing.end(), v)) textless.push_back(v);
  return render_prompt(in.prompt, in.texts.texts.at(v), in.space);
}

void report_textless(const std::vector<NodeId>& textless, bool strict, std::vector<std::string>& warnings) {
  if (textless.empty()) return;
  if (strict) throw Error("strict mode: no text for nodes: " + id_list(textless));
  for (NodeId v : textless)
    warnings.push_back("node " + std::to_string(v) + " has no text; prompt rendered with an empty description");
}

template <class Fn>
auto in_stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (shots == 0) throw Error("shots must be >= 1");
  if (top_k == 0) throw Error("top-k must be >= 1");
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error("tau must lie in [0, 1]");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error("lambda must be >= 0");
  if (judge.hops == 0) throw Error("judge hops must be >= 1");
  if (llm_predictions.has_value() == endpoint.has_value())
    throw Error("exactly one of an llm predictions file or an endpoint is required");
  if (endpoint) fetch.validate();
  if (out_dir.empty()) throw Error("an output directory is required");
  for (const auto* p : {&graph, &features, &labels, &label_space, &texts})
    if (p->empty()) throw Error("graph, features, labels, label-space and texts paths are all required");
}

std::string PipelineConfig::canonical_json() const {
  json j;
  j["graph"] = graph.generic_string();
  j["features"] = features.generic_string();
  j["labels"] = labels.generic_string();
  j["label_space"] = label_space.generic_string();
  j["texts"] = texts.generic_string();
  j["shots"] = shots;
  j["seed"] = seed;
  j["top_k"] = top_k;
  j["tau"] = tau;
  j["lambda"] = lambda;
  j["judge"] = {{"hops", judge.hops},
                {"learning_rate", judge.learning_rate},
                {"weight_decay", judge.weight_decay},
                {"max_epochs", judge.max_epochs},
                {"patience", judge.patience}};
  j["val_size"] = val_size ? json(*val_size) : json(nullptr);
  j["subgraph_hops"] = subgraph_hops ? json(*subgraph_hops) : json(nullptr);
  j["llm_predictions"] = opt_path(llm_predictions);
  j["endpoint"] = endpoint ? json(*endpoint) : json(nullptr);
  j["fetch"] = {{"concurrency", fetch.concurrency},
                {"max_attempts", fetch.max_attempts},
                {"initial_backoff_ms", fetch.initial_backoff.count()},
                {"backoff_factor", fetch.backoff_factor},
                {"timeout_ms", fetch.timeout.count()},
                {"cache", opt_path(fetch.cache)}};
  j["template"] = template_name;
  j["template_file"] = opt_path(template_file);
  j["strict"] = strict;
  return j.dump();
}

std::string PipelineConfig::hash() const { return sha256_hex(canonical_json()); }

void apply_seed_override(PipelineConfig& config) {
  const char* env = std::getenv("COLABEL_SEED");
  if (!env) return;
  std::string s(env);
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || s.front() == '-') throw Error("COLABEL_SEED is not an unsigned integer: '" + s + "'");
  config.seed = v;
}

PromptTemplate resolve_template(const PipelineConfig& config) {
  PromptTemplate tpl = config.template_file
                           ? PromptTemplate{config.template_file->stem().string(), read_file(*config.template_file)}
                           : builtin_template(config.template_name);
  while (!tpl.text.empty() && (tpl.text.back() == '\n' || tpl.text.back() == '\r')) tpl.text.pop_back();
  check_template(tpl);
  return tpl;
}

PipelineInputs load_inputs(const PipelineConfig& config) {
  PipelineInputs in;
  in.graph = load_graph(config.graph);
  const std::size_t n = in.graph.num_nodes();
  in.features = load_features(config.features, n);
  in.space = load_label_space(config.label_space);
  in.labels = load_labels(config.labels, in.space, n);
  in.texts = load_texts(config.texts, n);
  in.prompt = resolve_template(config);
  return in;
}

std::size_t default_val_size(const LabelAssignment& labels, std::size_t num_classes, std::size_t shots) {
  std::size_t known = 0;
  for (const auto& l : labels.labels) known += l.has_value();
  const std::size_t train = num_classes * shots;
  const std::size_t rest = known > train ? known - train : 0;
  return std::min<std::size_t>(500, rest / 5);
}

Split run_split_stage(const PipelineInputs& in, const PipelineConfig& config) {
  const std::size_t c = in.space.size();
  const std::size_t val = config.val_size.value_or(default_val_size(in.labels, c, config.shots));
  Split split = make_few_shot_split(in.labels, c, config.shots, val, config.seed);
  validate_split(split, in.labels, c);
  return split;
}

JudgeOutput run_judge_stage(const PipelineInputs& in, const Split& split, const PipelineConfig& config) {
  const FeatureMatrix smoothed = propagate(in.features, in.graph, config.judge.hops);
  JudgeOutput out;
  out.model = train_judge(smoothed, split, in.labels, in.space.size(), config.judge, config.seed);
  out.probs = predict_proba(out.model, smoothed);
  return out;
}

SelectOutput run_select_stage(const Graph& graph, const Split& split, const PipelineConfig& config) {
  const auto candidates = complement_nodes(graph.num_nodes(), split.train);
  SelectOutput out;
  out.scores = influence_scores(graph, split.train, candidates);
  if (config.subgraph_hops) restrict_to_hops(out.scores, *config.subgraph_hops);
  out.selection = select_top_k(out.scores, config.top_k);
  return out;
}

std::vector<std::string> render_prompts(std::span<const NodeId> nodes, const PipelineInputs& in) {
  std::vector<std::string> out;
  out.reserve(nodes.size());
  for (NodeId v : nodes) out.push_back(render_prompt(in.prompt, in.texts.texts.at(v), in.space));
  return out;
}

LlmAnnotations run_annotate_stage(const PipelineInputs& in, std::span<const NodeId> selected,
                                  const PipelineConfig& config, std::vector<std::string>& warnings) {
  const std::size_t n = in.graph.num_nodes();
  const auto nodes = sorted(selected);
  if (config.llm_predictions) {
    LlmAnnotations ann = load_llm_predictions(*config.llm_predictions, n);
    std::vector<NodeId> missing;
    for (NodeId v : nodes)
      if (!ann.raw[v]) missing.push_back(v);
    if (!missing.empty()) throw Error("missing predictions for nodes: " + id_list(missing));
    return ann;
  }
  return fetch_llm_predictions(*config.endpoint, nodes, render_prompts(nodes, in), n, config.fetch, &warnings);
}

PartitionResult run_partition_stage(const ProbMatrix& probs, const LlmAnnotations& annotations,
                                    const LabelSpace& space, std::span<const NodeId> selected, double tau) {
  if (probs.cols() != space.size()) throw Error("judge probabilities do not match the label space");
  return co_label(PredictionSet::from_probs(probs), annotations.parse(space), selected, tau);
}

EmittedFile emit_instruction_dataset(const PartitionResult& partition, const PredictionSet& gnn,
                                     const PipelineInputs& in, bool strict, std::vector<std::string>& warnings) {
  EmittedFile out;
  std::vector<NodeId> textless;
  for (NodeId v : sorted(partition.agreed)) {
    const auto& p = gnn.labels.at(v);
    if (!p.parsed()) throw Error("agreed node " + std::to_string(v) + " has no judge label");
    ordered_json j;
    j["prompt"] = prompt_for(v, in, textless);
    j["completion"] = in.space.name(p.label);
    out.jsonl += j.dump() + "\n";
    ++out.records;
  }
  report_textless(textless, strict, warnings);
  return out;
}

EmittedFile emit_preference_dataset(const PartitionResult& partition, const PipelineInputs& in, bool strict,
                                    std::vector<std::string>& warnings) {
  auto kept = partition.filtered;
  std::sort(kept.begin(), kept.end(), [](const ScoredNode& a, const ScoredNode& b) { return a.node < b.node; });
  EmittedFile out;
  std::vector<NodeId> textless;
  for (const auto& s : kept) {
    if (s.gnn == s.llm) throw Error("preference record for node " + std::to_string(s.node) + " has chosen == rejected");
    ordered_json j;
    j["prompt"] = prompt_for(s.node, in, textless);
    j["chosen"] = in.space.name(s.gnn);
    j["rejected"] = in.space.name(s.llm);
    out.jsonl += j.dump() + "\n";
    ++out.records;
  }
  report_textless(textless, strict, warnings);
  return out;
}

std::string build_manifest(const PipelineConfig& config, const ManifestCounts& counts,
                           const std::map<std::string, std::string>& files) {
  json j;
  j["seed"] = config.seed;
  j["config_hash"] = config.hash();
  j["config"] = json::parse(config.canonical_json());
  j["counts"] = {{"nodes", counts.nodes},
                 {"train", counts.train},
                 {"selected", counts.selected},
                 {"agreed", counts.agreed},
                 {"disagreed", counts.disagreed},
                 {"unparsed", counts.unparsed},
                 {"filtered_disagreed", counts.filtered_disagreed},
                 {"instruct", counts.instruct},
                 {"prefs", counts.prefs}};
  json hashes = json::object();
  for (const auto& [name, contents] : files) hashes[name] = sha256_hex(contents);
  j["files"] = hashes;
  return j.dump(2) + "\n";
}

RunSummary run_pipeline(const PipelineConfig& config) {
  in_stage("config", [&] {
    config.validate();
    return 0;
  });
  RunSummary summary;
  summary.config_hash = config.hash();

  const fs::path out = config.out_dir;
  const bool created = !fs::exists(out);
  fs::create_directories(out);
  const fs::path staging = out / ".colabel-staging";
  fs::remove_all(staging);
  fs::create_directories(staging);

  try {
    auto& warnings = summary.warnings;
    std::map<std::string, std::string> files;

    const PipelineInputs in = in_stage("load", [&] { return load_inputs(config); });
    const Split split = in_stage("split", [&] { return run_split_stage(in, config); });
    files[artifact::kSplit] = split_to_json(split);

    const JudgeOutput judge = in_stage("train-judge", [&] { return run_judge_stage(in, split, config); });
    files[artifact::kJudge] = judge_to_json(judge.model);
    {
      std::ostringstream os;
      write_probs_csv(judge.probs, os);
      files[artifact::kProbs] = os.str();
    }

    const SelectOutput sel = in_stage("select", [&] { return run_select_stage(in.graph, split, config); });
    if (sel.selection.shortfall_warning) warnings.push_back(*sel.selection.shortfall_warning);
    {
      std::ostringstream os;
      write_scores_csv(sel.scores, os);
      files[artifact::kScores] = os.str();
    }
    files[artifact::kSelected] = selection_to_json(sel.selection);
    const auto& selected = sel.selection.nodes;

    const LlmAnnotations ann =
        in_stage("annotate", [&] { return run_annotate_stage(in, selected, config, warnings); });
    files[artifact::kAnnotations] = annotations_to_jsonl(ann, sorted(selected), in.space);

    const PredictionSet gnn = PredictionSet::from_probs(judge.probs);
    const PredictionSet llm = ann.parse(in.space);
    const PartitionResult part = in_stage(
        "partition", [&] { return run_partition_stage(judge.probs, ann, in.space, selected, config.tau); });
    files[artifact::kPartition] = partition_to_json(part);

    const EmittedFile instruct =
        in_stage("emit", [&] { return emit_instruction_dataset(part, gnn, in, config.strict, warnings); });
    const EmittedFile prefs =
        in_stage("emit", [&] { return emit_preference_dataset(part, in, config.strict, warnings); });
    files[artifact::kInstruct] = instruct.jsonl;
    files[artifact::kPrefs] = prefs.jsonl;

    files[artifact::kReport] =
        in_stage("report", [&] { return build_report(part, gnn, llm, in.space.size(), &in.labels, warnings); });

    auto& c = summary.counts;
    c.nodes = in.graph.num_nodes();
    c.train = split.train.size();
    c.selected = selected.size();
    c.agreed = part.agreed.size();
    c.disagreed = part.disagreed.size();
    c.unparsed = part.unparsed.size();
    c.filtered_disagreed = part.filtered.size();
    c.instruct = instruct.records;
    c.prefs = prefs.records;
    const std::string manifest = build_manifest(config, c, files);

    in_stage("write", [&] {
      for (const auto& [name, contents] : files) write_file(staging / name, contents);
      write_file(staging / artifact::kManifest, manifest);
      for (const auto& [name, contents] : files) fs::rename(staging / name, out / name);
      fs::rename(staging / artifact::kManifest, out / artifact::kManifest);
      return 0;
    });
    fs::remove_all(staging);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    if (created && fs::is_empty(out, ec)) fs::remove(out, ec);
    throw;
  }
  return summary;
}

}  // namespace colabel

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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "colabel/annotator_sim.hpp"
#include "colabel/generators.hpp"
#include "colabel/pipeline.hpp"
#include "colabel/rng.hpp"
#include "colabel/toy_tag.hpp"
#include "colabel/toy_trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace colabel;

namespace {

constexpr const char* kStageWarnings = "stage_warnings.json";

// Writes every file next to its destination first and renames afterwards, so
// a failing stage never leaves a half-written artifact behind.
void publish(const fs::path& dir, const std::map<std::string, std::string>& files) {
  fs::create_directories(dir);
  for (const auto& [name, contents] : files) write_file(dir / (name + ".tmp"), contents);
  for (const auto& [name, contents] : files) fs::rename(dir / (name + ".tmp"), dir / name);
}

template <class Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::string need(const fs::path& out, const char* name, const char* producer) {
  const fs::path p = out / name;
  if (!fs::exists(p)) throw Error(p.string() + " not found; run '" + producer + "' first");
  return read_file(p);
}

// Warnings of earlier stages, kept so a staged run reports the same list as `run`.
json load_stage_warnings(const fs::path& out) {
  const fs::path p = out / kStageWarnings;
  return fs::exists(p) ? json::parse(read_file(p)) : json::object();
}

void save_stage_warnings(const fs::path& out, const std::string& stage_name, const std::vector<std::string>& w) {
  json all = load_stage_warnings(out);
  all[stage_name] = w;
  publish(out, {{kStageWarnings, all.dump(2) + "\n"}});
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

struct PipelineFlags {
  PipelineConfig config;
  std::string llm_pred, endpoint, cache, template_file;
  long long val_size = -1;
  long long subgraph_hops = -1;
  long long backoff_ms = 200, timeout_ms = 30000;

  void add(CLI::App* app) {
    auto& c = config;
    app->add_option("--graph", c.graph, "Edge list (TSV, one 'u v' per line)")->required();
    app->add_option("--features", c.features, "Node features, CSV, one row per node")->required();
    app->add_option("--labels", c.labels, "Known labels, CSV 'node_id,label'")->required();
    app->add_option("--label-space", c.label_space, "JSON array of class names")->required();
    app->add_option("--texts", c.texts, "JSON lines {node_id, text}")->required();
    app->add_option("--out", c.out_dir, "Output directory")->required();
    app->add_option("--shots", c.shots, "Labeled nodes per class")->capture_default_str();
    app->add_option("--seed", c.seed, "Seed (COLABEL_SEED overrides)")->capture_default_str();
    app->add_option("--top-k", c.top_k, "Nodes to annotate")->capture_default_str();
    app->add_option("--tau", c.tau, "Preference-score threshold")->capture_default_str();
    app->add_option("--lambda", c.lambda, "Preference weight recorded for tuning")->capture_default_str();
    app->add_option("--hops", c.judge.hops, "Feature propagation hops of the judge")->capture_default_str();
    app->add_option("--lr", c.judge.learning_rate, "Judge learning rate")->capture_default_str();
    app->add_option("--weight-decay", c.judge.weight_decay, "Judge L2 weight")->capture_default_str();
    app->add_option("--epochs", c.judge.max_epochs, "Judge epoch cap")->capture_default_str();
    app->add_option("--patience", c.judge.patience, "Judge early-stopping patience")->capture_default_str();
    app->add_option("--val-size", val_size, "Validation nodes (default min(500, rest/5))");
    app->add_option("--subgraph-hops", subgraph_hops, "Only select nodes within this many hops of a train node");
    auto* pred = app->add_option("--llm-pred", llm_pred, "JSON lines {node_id, label} from the text predictor");
    auto* ep = app->add_option("--endpoint", endpoint, "HTTP endpoint answering {\"prompt\"} with {\"label\"}");
    pred->excludes(ep);
    app->add_option("--cache", cache, "Endpoint response replay file");
    app->add_option("--concurrency", c.fetch.concurrency, "Requests in flight")->capture_default_str();
    app->add_option("--max-attempts", c.fetch.max_attempts, "Attempts per prompt")->capture_default_str();
    app->add_option("--backoff-ms", backoff_ms, "First retry delay")->capture_default_str();
    app->add_option("--timeout-ms", timeout_ms, "Per-request timeout")->capture_default_str();
    app->add_option("--template", c.template_name, "Built-in prompt template")
        ->check(CLI::IsMember(builtin_template_names()))
        ->capture_default_str();
    app->add_option("--template-file", template_file, "Prompt template file with {raw_text}, {num_classes}, {labels}");
    app->add_flag("--strict", c.strict, "Fail when a selected node has no text");
  }

  PipelineConfig finish() {
    if (!llm_pred.empty()) config.llm_predictions = llm_pred;
    if (!endpoint.empty()) config.endpoint = endpoint;
    if (!cache.empty()) config.fetch.cache = cache;
    if (!template_file.empty()) config.template_file = template_file;
    if (val_size >= 0) config.val_size = static_cast<std::size_t>(val_size);
    if (subgraph_hops >= 0) config.subgraph_hops = static_cast<std::uint32_t>(subgraph_hops);
    config.fetch.initial_backoff = std::chrono::milliseconds(backoff_ms);
    config.fetch.timeout = std::chrono::milliseconds(timeout_ms);
    apply_seed_override(config);
    stage("config", [&] {
      config.validate();
      return 0;
    });
    return config;
  }
};

PipelineInputs load(const PipelineConfig& c) {
  return stage("load", [&] { return load_inputs(c); });
}

ProbMatrix load_probs(const fs::path& out, const PipelineInputs& in) {
  std::istringstream is(need(out, artifact::kProbs, "train-judge"));
  return read_probs_csv(is, in.graph.num_nodes(), in.space.size(), (out / artifact::kProbs).string());
}

LlmAnnotations load_annotations(const fs::path& out, const PipelineInputs& in) {
  std::istringstream is(need(out, artifact::kAnnotations, "annotate"));
  return annotations_from_jsonl(is, in.graph.num_nodes(), (out / artifact::kAnnotations).string());
}

void cmd_split(const PipelineConfig& c) {
  const auto in = load(c);
  const Split split = stage("split", [&] { return run_split_stage(in, c); });
  publish(c.out_dir, {{artifact::kSplit, split_to_json(split)}});
  std::cout << "train " << split.train.size() << ", val " << split.val.size() << ", test " << split.test.size() << "\n";
}

void cmd_train_judge(const PipelineConfig& c) {
  const auto in = load(c);
  const Split split = stage("train-judge", [&] {
    return split_from_json(need(c.out_dir, artifact::kSplit, "split"), (c.out_dir / artifact::kSplit).string());
  });
  const JudgeOutput judge = stage("train-judge", [&] { return run_judge_stage(in, split, c); });
  std::ostringstream probs;
  write_probs_csv(judge.probs, probs);
  publish(c.out_dir, {{artifact::kJudge, judge_to_json(judge.model)}, {artifact::kProbs, probs.str()}});
  std::printf("epochs %zu, best val accuracy %.4f, test accuracy %.4f\n", judge.model.epochs_run,
              judge.model.best_val_accuracy, accuracy(judge.probs, split.test, in.labels));
}

void cmd_select(const PipelineConfig& c) {
  const auto in = load(c);
  const SelectOutput sel = stage("select", [&] {
    const Split split =
        split_from_json(need(c.out_dir, artifact::kSplit, "split"), (c.out_dir / artifact::kSplit).string());
    return run_select_stage(in.graph, split, c);
  });
  std::vector<std::string> warnings;
  if (sel.selection.shortfall_warning) warnings.push_back(*sel.selection.shortfall_warning);
  std::ostringstream scores;
  write_scores_csv(sel.scores, scores);
  publish(c.out_dir, {{artifact::kScores, scores.str()}, {artifact::kSelected, selection_to_json(sel.selection)}});
  save_stage_warnings(c.out_dir, "select", warnings);
  print_warnings(warnings);
  std::cout << "selected " << sel.selection.nodes.size() << " nodes\n";
}

std::vector<NodeId> load_selected(const fs::path& out) {
  return selection_from_json(need(out, artifact::kSelected, "select"), (out / artifact::kSelected).string());
}

void cmd_annotate(const PipelineConfig& c) {
  const auto in = load(c);
  std::vector<std::string> warnings;
  auto selected = stage("annotate", [&] { return load_selected(c.out_dir); });
  const LlmAnnotations ann = stage("annotate", [&] { return run_annotate_stage(in, selected, c, warnings); });
  std::sort(selected.begin(), selected.end());
  publish(c.out_dir, {{artifact::kAnnotations, annotations_to_jsonl(ann, selected, in.space)}});
  save_stage_warnings(c.out_dir, "annotate", warnings);
  print_warnings(warnings);
  std::cout << "annotated " << selected.size() << " nodes\n";
}

void cmd_partition(const PipelineConfig& c) {
  const auto in = load(c);
  const PartitionResult part = stage("partition", [&] {
    const auto selected = load_selected(c.out_dir);
    return run_partition_stage(load_probs(c.out_dir, in), load_annotations(c.out_dir, in), in.space, selected, c.tau);
  });
  publish(c.out_dir, {{artifact::kPartition, partition_to_json(part)}});
  std::cout << "agreed " << part.agreed.size() << ", disagreed " << part.disagreed.size() << " (kept "
            << part.filtered.size() << " at tau " << c.tau << "), unparsed " << part.unparsed.size() << "\n";
}

PartitionResult load_partition(const fs::path& out) {
  return partition_from_json(need(out, artifact::kPartition, "partition"), (out / artifact::kPartition).string());
}

void cmd_emit(const PipelineConfig& c) {
  const auto in = load(c);
  std::vector<std::string> warnings;
  const auto [instruct, prefs] = stage("emit", [&] {
    const PartitionResult part = load_partition(c.out_dir);
    const PredictionSet gnn = PredictionSet::from_probs(load_probs(c.out_dir, in));
    auto a = emit_instruction_dataset(part, gnn, in, c.strict, warnings);
    auto b = emit_preference_dataset(part, in, c.strict, warnings);
    return std::pair{a, b};
  });
  publish(c.out_dir, {{artifact::kInstruct, instruct.jsonl}, {artifact::kPrefs, prefs.jsonl}});
  save_stage_warnings(c.out_dir, "emit", warnings);
  print_warnings(warnings);
  std::cout << "instruction records " << instruct.records << ", preference records " << prefs.records << "\n";
}

void cmd_report(const PipelineConfig& c) {
  const auto in = load(c);
  stage("report", [&] {
    const fs::path& out = c.out_dir;
    const PartitionResult part = load_partition(out);
    const ProbMatrix probs = load_probs(out, in);
    const LlmAnnotations ann = load_annotations(out, in);
    const json stage_warnings = load_stage_warnings(out);
    std::vector<std::string> warnings;
    for (const char* s : {"select", "annotate", "emit"})
      if (stage_warnings.contains(s))
        for (const auto& w : stage_warnings.at(s)) warnings.push_back(w.get<std::string>());

    std::map<std::string, std::string> files;
    for (const char* name : {artifact::kSplit, artifact::kJudge, artifact::kProbs, artifact::kScores,
                             artifact::kSelected, artifact::kAnnotations, artifact::kPartition, artifact::kInstruct,
                             artifact::kPrefs})
      files[name] = need(out, name, "the earlier stages");
    files[artifact::kReport] = build_report(part, PredictionSet::from_probs(probs), ann.parse(in.space),
                                            in.space.size(), &in.labels, warnings);

    ManifestCounts counts;
    counts.nodes = in.graph.num_nodes();
    counts.train = split_from_json(files[artifact::kSplit]).train.size();
    counts.selected = part.selected.size();
    counts.agreed = part.agreed.size();
    counts.disagreed = part.disagreed.size();
    counts.unparsed = part.unparsed.size();
    counts.filtered_disagreed = part.filtered.size();
    counts.instruct = count_lines(files[artifact::kInstruct]);
    counts.prefs = count_lines(files[artifact::kPrefs]);
    const std::string manifest = build_manifest(c, counts, files);
    publish(out, {{artifact::kReport, files[artifact::kReport]}, {artifact::kManifest, manifest}});
    std::cout << files[artifact::kReport];
    return 0;
  });
}

void cmd_run(const PipelineConfig& c) {
  const RunSummary s = run_pipeline(c);
  print_warnings(s.warnings);
  std::cout << "selected " << s.counts.selected << ", agreed " << s.counts.agreed << ", disagreed "
            << s.counts.disagreed << " (kept " << s.counts.filtered_disagreed << "), unparsed " << s.counts.unparsed
            << "\nwrote " << c.out_dir.string() << " (config " << s.config_hash.substr(0, 12) << ")\n";
}

// ---- simulation and checks ----

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw Error("not a number in list: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error("empty list");
  return out;
}

json nan_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct SimFlags {
  SimConfig config;
  std::string out;
  std::string taus = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
  double tau = 0.7;
  std::string scan_llm, scan_gnn;
  std::vector<double> correct{8, 2}, wrong{2, 2};

  void add(CLI::App* app) {
    auto& c = config;
    app->add_option("--n", c.n, "Simulated nodes")->capture_default_str();
    app->add_option("--classes", c.num_classes, "Number of classes")->capture_default_str();
    app->add_option("--p-llm", c.p_llm, "Text-predictor accuracy")->capture_default_str();
    app->add_option("--p-gnn", c.p_gnn, "Judge accuracy")->capture_default_str();
    app->add_option("--seed", c.seed)->capture_default_str();
    app->add_option("--conf-correct", correct, "Beta(a,b) of the judge's top mass when right")->expected(2);
    app->add_option("--conf-wrong", wrong, "Beta(a,b) of the judge's top mass when wrong")->expected(2);
    app->add_option("--hard-fraction", c.hard_fraction, "Share of nodes both annotators find hard");
    app->add_option("--hard-penalty", c.hard_penalty, "Accuracy lost on hard nodes");
    app->add_option("--tau", tau, "Threshold for the summary")->capture_default_str();
    app->add_option("--taus", taus, "Comma-separated thresholds for the sweep")->capture_default_str();
    app->add_option("--scan-llm", scan_llm, "Comma-separated text-predictor accuracies for a bound scan");
    app->add_option("--scan-gnn", scan_gnn, "Comma-separated judge accuracies for a bound scan");
    app->add_option("--out", out, "Directory for simulation.json, tau_sweep.csv and scan.json");
  }

  SimConfig finish() {
    config.confidence_correct = {correct[0], correct[1]};
    config.confidence_wrong = {wrong[0], wrong[1]};
    if (const char* env = std::getenv("COLABEL_SEED")) config.seed = std::stoull(env);
    config.validate();
    return config;
  }
};

int cmd_simulate(SimFlags& f) {
  const SimConfig cfg = f.finish();
  for (const auto& w : cfg.warnings()) std::cerr << "warning: " << w << "\n";
  const SimResult sim = simulate(cfg);
  const SimEvaluation ev = evaluate(sim, f.tau);
  std::printf("agreed %zu (accuracy %.4f, bound %.4f), disagreed %zu, kept at tau %.2f: %zu\n", ev.agreed,
              ev.agreement_accuracy, ev.analytic_bound, ev.disagreed, f.tau, ev.filtered);
  std::printf("final set accuracy %.4f (text predictor on it %.4f)\n", ev.final_accuracy, ev.final_llm_accuracy);

  const auto taus = parse_list(f.taus);
  const auto rows = ev.disagreed ? tau_sweep(sim, taus) : std::vector<TauRow>{};
  std::ostringstream sweep;
  write_tau_sweep_csv(rows, sweep);
  if (ev.disagreed) std::cout << sweep.str();

  int status = 0;
  std::map<std::string, std::string> files;
  if (!f.scan_llm.empty() || !f.scan_gnn.empty()) {
    const auto pl = parse_list(f.scan_llm.empty() ? std::to_string(cfg.p_llm) : f.scan_llm);
    const auto pg = parse_list(f.scan_gnn.empty() ? std::to_string(cfg.p_gnn) : f.scan_gnn);
    const ScanReport scan = bound_violation_scan(pl, pg, cfg);
    std::printf("bound scan: %zu cells, %zu violations\n", scan.cells.size(), scan.violations());
    files["scan.json"] = scan_to_json(scan);
    status = scan.violations() ? 1 : 0;
  }
  if (!f.out.empty()) {
    json j;
    j["config"] = {{"n", cfg.n},
                   {"classes", cfg.num_classes},
                   {"p_llm", cfg.p_llm},
                   {"p_gnn", cfg.p_gnn},
                   {"seed", cfg.seed},
                   {"conf_correct", f.correct},
                   {"conf_wrong", f.wrong},
                   {"hard_fraction", cfg.hard_fraction},
                   {"hard_penalty", cfg.hard_penalty},
                   {"tau", f.tau}};
    j["agreed"] = ev.agreed;
    j["disagreed"] = ev.disagreed;
    j["filtered"] = ev.filtered;
    j["agreement_accuracy"] = nan_null(ev.agreement_accuracy);
    j["analytic_bound"] = ev.analytic_bound;
    j["llm_accuracy"] = ev.llm_accuracy;
    j["gnn_accuracy"] = ev.gnn_accuracy;
    j["final_accuracy"] = nan_null(ev.final_accuracy);
    j["final_llm_accuracy"] = nan_null(ev.final_llm_accuracy);
    j["final_gnn_accuracy"] = nan_null(ev.final_gnn_accuracy);
    files["simulation.json"] = j.dump(2) + "\n";
    if (ev.disagreed) files["tau_sweep.csv"] = sweep.str();
    publish(f.out, files);
  }
  return status;
}

struct BoundFlags {
  std::size_t graphs = 100, trees = 50, min_nodes = 5, max_nodes = 50;
  std::uint64_t seed = 1;
};

int cmd_verify_bounds(const BoundFlags& f) {
  if (f.min_nodes < 2 || f.max_nodes < f.min_nodes) throw Error("need 2 <= min-nodes <= max-nodes");
  double worst = -std::numeric_limits<double>::infinity(), tree_gap = 0.0;
  std::size_t pairs = 0;
  const std::size_t span = f.max_nodes - f.min_nodes + 1;
  for (std::size_t i = 0; i < f.graphs + f.trees; ++i) {
    CounterRng rng(f.seed, i);
    const std::size_t n = f.min_nodes + uniform_index(rng, span);
    const bool tree = i >= f.graphs;
    const Graph g = tree ? gen::random_tree(n, rng()) : gen::random_connected_graph(n, 0.1 + 0.3 * rng.uniform(), rng());
    std::vector<NodeId> sources;
    for (NodeId v = 0; v < g.num_nodes(); ++v)
      if (v == 0 || rng.uniform() < 0.3) sources.push_back(v);
    const BoundCheck check = check_influence_bounds(g, sources);
    pairs += check.pairs;
    worst = std::max(worst, check.max_excess);
    if (tree) tree_gap = std::max(tree_gap, check.max_abs_gap);
  }
  const bool ok = worst <= 1e-12 && tree_gap <= 1e-12;
  std::printf("%zu graphs, %zu trees, %zu pairs: max(oracle - bound) = %.3g, max tree gap = %.3g -> %s\n", f.graphs,
              f.trees, pairs, worst, tree_gap, ok ? "ok" : "VIOLATED");
  return ok ? 0 : 1;
}

struct ToyFlags {
  std::string out;
  ToyTagOptions options;
};

void cmd_gen_toy(const ToyFlags& f) {
  const ToyTag tag = make_toy_tag(f.options);
  write_toy_tag(tag, f.out);
  std::cout << "wrote " << tag.graph.num_nodes() << " nodes, " << tag.graph.num_edges() << " edges to " << f.out
            << "\n";
}

struct TrainToyFlags {
  std::string instruct, prefs, label_space, val, out;
  ToyConfig config;
  std::uint64_t seed = 0;

  // Prompts are long raw-count vectors; 0.5 overshoots on them.
  TrainToyFlags() { config.learning_rate = 0.1; }

  void add(CLI::App* app) {
    app->add_option("--instruct", instruct, "Instruction JSON lines {prompt, completion}")->required();
    app->add_option("--prefs", prefs, "Preference JSON lines {prompt, chosen, rejected}");
    app->add_option("--label-space", label_space, "JSON array of class names")->required();
    app->add_option("--val", val, "Held-out JSON lines {prompt, completion} for early stopping");
    app->add_option("--out", out, "Directory for toy_model.json and curve.csv")->required();
    app->add_option("--lambda", config.loss.lambda, "Preference weight")->capture_default_str();
    app->add_option("--lr", config.learning_rate)->capture_default_str();
    app->add_option("--epochs", config.epochs)->capture_default_str();
    app->add_option("--patience", config.patience)->capture_default_str();
    app->add_option("--init-scale", config.init_scale)->capture_default_str();
    app->add_option("--min-count", config.min_token_count, "Minimum token frequency")->capture_default_str();
    app->add_option("--seed", seed)->capture_default_str();
  }
};

template <class Fn>
void for_each_record(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError(path, no, e.what());
    } catch (const Error& e) {
      throw ParseError(path, no, e.what());
    }
  }
}

ClassId class_of(const LabelSpace& space, const json& name) {
  const auto c = space.index_of(name.get<std::string>());
  if (!c) throw Error("unknown class '" + name.get<std::string>() + "'");
  return *c;
}

void cmd_train_toy(const TrainToyFlags& f) {
  const LabelSpace space = load_label_space(f.label_space);
  std::vector<AgreeExample> agree, val;
  std::vector<PrefExample> prefs;
  auto read_agree = [&](const std::string& path, std::vector<AgreeExample>& into) {
    for_each_record(path, [&](const json& j) {
      into.push_back({j.at("prompt").get<std::string>(), class_of(space, j.at("completion"))});
    });
  };
  read_agree(f.instruct, agree);
  if (!f.val.empty()) read_agree(f.val, val);
  if (!f.prefs.empty())
    for_each_record(f.prefs, [&](const json& j) {
      prefs.push_back({j.at("prompt").get<std::string>(), class_of(space, j.at("chosen")), class_of(space, j.at("rejected"))});
    });

  auto [model, curve] = train_weakly_supervised(agree, prefs, space.size(), f.config, f.seed, val);
  std::ostringstream csv;
  write_curve_csv(curve, csv);
  publish(f.out, {{"toy_model.json", toy_to_json(model)}, {"curve.csv", csv.str()}});
  std::printf("%zu instruction + %zu preference examples, %zu epochs, final loss %.6f, train accuracy %.4f\n",
              agree.size(), prefs.size(), curve.loss.size(), curve.loss.empty() ? 0.0 : curve.loss.back(),
              accuracy(model, agree));
  if (!val.empty()) std::printf("validation accuracy %.4f\n", accuracy(model, val));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Co-labeling of graph nodes with a text predictor and a graph judge"};
  app.require_subcommand(1);

  struct StageCmd {
    const char* name;
    const char* help;
    void (*fn)(const PipelineConfig&);
  };
  const std::vector<StageCmd> stages{
      {"split", "Few-shot train/val/test split", cmd_split},
      {"train-judge", "Train the graph judge and write class probabilities", cmd_train_judge},
      {"select", "Score unlabeled nodes by influence and pick the top K", cmd_select},
      {"annotate", "Collect text-predictor labels for the selected nodes", cmd_annotate},
      {"partition", "Split selected nodes into agreed / disagreed and filter by tau", cmd_partition},
      {"emit", "Write instruction and preference datasets", cmd_emit},
      {"report", "Write the selection report and manifest", cmd_report},
      {"run", "Every stage in one go", cmd_run},
  };
  std::vector<std::unique_ptr<PipelineFlags>> stage_flags;
  std::function<int()> action;
  for (const auto& s : stages) {
    auto* sub = app.add_subcommand(s.name, s.help);
    stage_flags.push_back(std::make_unique<PipelineFlags>());
    auto* flags = stage_flags.back().get();
    flags->add(sub);
    sub->callback([&action, flags, fn = s.fn] {
      action = [flags, fn] {
        fn(flags->finish());
        return 0;
      };
    });
  }

  SimFlags sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo of two noisy annotators");
  sim.add(sim_cmd);
  sim_cmd->callback([&] { action = [&] { return cmd_simulate(sim); }; });

  BoundFlags bounds;
  auto* vb = app.add_subcommand("verify-bounds", "Check the influence bound against exact walk influence");
  vb->add_option("--graphs", bounds.graphs)->capture_default_str();
  vb->add_option("--trees", bounds.trees)->capture_default_str();
  vb->add_option("--min-nodes", bounds.min_nodes)->capture_default_str();
  vb->add_option("--max-nodes", bounds.max_nodes)->capture_default_str();
  vb->add_option("--seed", bounds.seed)->capture_default_str();
  vb->callback([&] { action = [&] { return cmd_verify_bounds(bounds); }; });

  ToyFlags toy;
  auto* gt = app.add_subcommand("gen-toy", "Write the small text-attributed toy graph");
  gt->add_option("--out", toy.out)->required();
  gt->add_option("--n", toy.options.n)->capture_default_str();
  gt->add_option("--intra", toy.options.intra_prob)->capture_default_str();
  gt->add_option("--inter", toy.options.inter_prob)->capture_default_str();
  gt->add_option("--seed", toy.options.seed)->capture_default_str();
  gt->callback([&] {
    action = [&] {
      cmd_gen_toy(toy);
      return 0;
    };
  });

  TrainToyFlags tt;
  auto* tt_cmd = app.add_subcommand("train-toy", "Fit the bag-of-words model on emitted datasets");
  tt.add(tt_cmd);
  tt_cmd->callback([&] {
    action = [&] {
      cmd_train_toy(tt);
      return 0;
    };
  });

  CLI11_PARSE(app, argc, argv);
  try {
    return action ? action() : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

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

// One line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include <json.hpp>

#include "colabel/annotator_sim.hpp"
#include "colabel/generators.hpp"
#include "colabel/influence.hpp"
#include "colabel/judge.hpp"
#include "colabel/objectives.hpp"
#include "colabel/pipeline.hpp"
#include "colabel/rng.hpp"
#include "colabel/toy_tag.hpp"
#include "colabel/toy_trainer.hpp"
#include "lr_oracle.hpp"
#include "temp_dir.hpp"

using namespace colabel;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Agreement accuracy at p_llm = 0.8, p_gnn = 0.7, C = 7: 0.56 / (0.56 + 0.06 / 6).
constexpr double kAgreementAccuracy = 0.982456140350877192982456140351;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome influence_bound() {
  double excess = -INFINITY, tree_gap = 0.0;
  std::size_t pairs = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CounterRng rng(seed, 1);
    const std::size_t n = 5 + uniform_index(rng, 46);
    const Graph g = gen::random_connected_graph(n, 0.1 + 0.3 * rng.uniform(), seed);
    std::vector<NodeId> labeled(n);
    for (NodeId v = 0; v < n; ++v) labeled[v] = v;
    const BoundCheck c = check_influence_bounds(g, labeled);
    pairs += c.pairs;
    excess = std::max(excess, c.max_excess);
  }
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Graph g = gen::random_tree(10 + seed % 41, 1000 + seed);
    std::vector<NodeId> labeled{0, static_cast<NodeId>(g.num_nodes() / 2), static_cast<NodeId>(g.num_nodes() - 1)};
    const BoundCheck c = check_influence_bounds(g, labeled);
    pairs += c.pairs;
    tree_gap = std::max(tree_gap, c.max_abs_gap);
  }
  return {excess <= 1e-12 && tree_gap <= 1e-12,
          fmt("%zu pairs, max(oracle - bound) %.2e, tree gap %.2e", pairs, excess, tree_gap)};
}

Outcome agreement_monte_carlo() {
  SimConfig cfg;
  cfg.seed = 20240601;
  const SimEvaluation e = evaluate(simulate(cfg), 0.7);
  const bool close = std::abs(e.agreement_accuracy - kAgreementAccuracy) <= 0.003;
  const bool dominant = e.agreement_accuracy >= 0.8;
  const std::vector<double> grid{0.3, 0.45, 0.6, 0.75, 0.9};
  SimConfig base;
  base.n = 100000;
  base.seed = 5;
  const ScanReport scan = bound_violation_scan(grid, grid, base);
  return {close && dominant && std::abs(e.analytic_bound - kAgreementAccuracy) < 1e-12 && scan.violations() == 0,
          fmt("empirical %.5f vs %.5f, scan %zu cells, %zu violations", e.agreement_accuracy, kAgreementAccuracy,
              scan.cells.size(), scan.violations())};
}

ToyModel random_model(const Vocabulary& vocab, std::size_t classes, std::uint64_t seed, double scale) {
  auto m = ToyModel::zeros(vocab, classes);
  CounterRng rng(seed, 3);
  for (double& w : m.weights.values()) w = scale * (2.0 * rng.uniform() - 1.0);
  for (double& b : m.bias) b = scale * (2.0 * rng.uniform() - 1.0);
  return m;
}

Outcome gradient_oracles() {
  CounterRng rng(3, 3);
  const double h = 1e-6;
  double worst_pref = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double pw = 0.01 + 0.98 * rng.uniform(), pl = 0.01 + 0.98 * rng.uniform();
    const auto a = preference_loss_grad(pw, pl);
    const double fw = (preference_loss(pw + h, pl) - preference_loss(pw - h, pl)) / (2 * h);
    const double fl = (preference_loss(pw, pl + h) - preference_loss(pw, pl - h)) / (2 * h);
    worst_pref = std::max({worst_pref, std::abs(a.d_p_w - fw) / std::abs(a.d_p_w), std::abs(a.d_p_l - fl) / std::abs(a.d_p_l)});
  }

  const auto corpus = synthetic_corpus(200, 50, 3, 8, 14);
  std::vector<std::string> texts;
  for (const auto& d : corpus.docs) texts.push_back(d.text);
  const Vocabulary vocab = Vocabulary::build(texts, 2);
  double worst_toy = 0.0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    CounterRng r(trial, 21);
    std::vector<AgreeExample> agree;
    std::vector<PrefExample> prefs;
    for (int i = 0; i < 5; ++i) {
      const auto& d = corpus.docs[uniform_index(r, corpus.docs.size())];
      if (i % 2 == 0) agree.push_back(d);
      else prefs.push_back({d.text, d.label, static_cast<ClassId>((d.label + 1) % 3)});
    }
    worst_toy = std::max(worst_toy, grad_check(random_model(vocab, 3, trial, 0.3), make_batch(agree, prefs, vocab, 3),
                                               LossConfig{0.1}));
  }
  return {worst_pref <= 1e-6 && worst_toy <= 1e-5,
          fmt("preference loss %.2e over 1000 pairs, toy trainer %.2e over 20 batches", worst_pref, worst_toy)};
}

Outcome tau_tradeoff() {
  SimConfig cfg;
  cfg.seed = 20240601;
  const SimResult sim = simulate(cfg);
  std::vector<double> taus;
  for (int i = 0; i <= 20; ++i) taus.push_back(i / 20.0);
  const auto rows = tau_sweep(sim, taus);
  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i) monotone = monotone && rows[i].size <= rows[i - 1].size;
  auto acc_at = [&](double t) {
    for (const auto& r : rows)
      if (std::abs(r.tau - t) < 1e-12) return r.accuracy.value_or(std::nan(""));
    return std::nan("");
  };
  const double lo = acc_at(0.1), hi = acc_at(0.9);
  return {monotone && hi >= lo + 0.05,
          fmt("sizes non-increasing: %s, accuracy %.4f at tau 0.1, %.4f at tau 0.9", monotone ? "yes" : "no", lo, hi)};
}

Outcome selection_dominance() {
  SimConfig cfg;
  cfg.n = 100000;
  cfg.seed = 77;
  const SimEvaluation e = evaluate(simulate(cfg), 0.7);
  const double best_single = std::max(e.final_llm_accuracy, e.final_gnn_accuracy);
  return {e.final_accuracy >= best_single,
          fmt("final set %.4f vs text predictor %.4f, judge %.4f on the same %zu nodes", e.final_accuracy,
              e.final_llm_accuracy, e.final_gnn_accuracy, e.agreed + e.filtered)};
}

Outcome end_to_end() {
  testing::TempDir dir("acceptance");
  const ToyTag tag = make_toy_tag();
  write_toy_tag(tag, dir / "data");
  auto config = [&](const fs::path& out) {
    PipelineConfig c;
    c.graph = dir / "data/graph.tsv";
    c.features = dir / "data/features.csv";
    c.labels = dir / "data/labels.csv";
    c.label_space = dir / "data/label_space.json";
    c.texts = dir / "data/texts.jsonl";
    c.llm_predictions = dir / "data/llm_predictions.jsonl";
    c.shots = 3;
    c.top_k = 150;
    c.tau = 0.7;
    c.seed = 2024;
    c.template_name = "cora";
    c.out_dir = out;
    return c;
  };
  const auto t0 = std::chrono::steady_clock::now();
  const RunSummary s = run_pipeline(config(dir / "a"));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  run_pipeline(config(dir / "b"));

  const char* names[] = {"split.json",     "judge.json",  "probs.csv",      "scores.csv",
                         "selected.json",  "annotations.jsonl", "partition.json", "report.json",
                         "instruct.jsonl", "prefs.jsonl", "manifest.json"};
  bool identical = true, valid = true;
  for (const char* n : names) {
    if (!fs::exists(dir / "a" / n)) return {false, fmt("%s missing", n)};
    identical = identical && read_file(dir / "a" / n) == read_file(dir / "b" / n);
  }
  auto check_lines = [&](const char* file, std::initializer_list<const char*> label_keys, std::size_t fields) {
    std::size_t lines = 0;
    std::istringstream in(read_file(dir / "a" / file));
    for (std::string l; std::getline(in, l); ++lines) {
      const json j = json::parse(l);
      valid = valid && j.size() == fields && j.at("prompt").is_string();
      for (const char* k : label_keys) valid = valid && tag.space.index_of(j.at(k).get<std::string>()).has_value();
      if (fields == 3) valid = valid && j.at("chosen") != j.at("rejected");
    }
    return lines;
  };
  const auto manifest = json::parse(read_file(dir / "a/manifest.json"));
  valid = valid && check_lines("instruct.jsonl", {"completion"}, 2) == manifest["counts"]["instruct"];
  valid = valid && check_lines("prefs.jsonl", {"chosen", "rejected"}, 3) == manifest["counts"]["prefs"];
  for (const auto& [n, h] : manifest["files"].items()) valid = valid && sha256_hex(read_file(dir / "a" / n)) == h;
  return {secs < 60.0 && identical && valid,
          fmt("%.2f s, %zu instruction + %zu preference records, schema %s, rerun %s", secs, s.counts.instruct,
              s.counts.prefs, valid ? "valid" : "INVALID", identical ? "byte-identical" : "DIFFERS")};
}

Outcome judge_sanity() {
  const std::size_t n = 200;
  auto pp = gen::planted_partition(n, 2, 0.1, 0.01, 42);
  const FeatureMatrix x = gen::class_correlated_features(pp.labels, 2, 16, 0.2, 43);
  const Split split = make_few_shot_split(pp.labels, 2, 3, 38, 44);
  JudgeHyper hyper;
  hyper.hops = 2;
  const FeatureMatrix s = propagate(x, pp.graph, hyper.hops);
  const JudgeModel model = train_judge(s, split, pp.labels, 2, hyper, 45);
  const double acc = accuracy(predict_proba(model, s), split.test, pp.labels);

  std::vector<std::vector<double>> xs;
  std::vector<std::size_t> ys;
  for (NodeId v : split.train) {
    xs.emplace_back(s.row(v).begin(), s.row(v).end());
    ys.push_back(pp.labels.at(v));
  }
  const auto oracle = testing::fit_lr_oracle(xs, ys, 2, hyper.learning_rate, hyper.weight_decay, hyper.max_epochs);
  std::size_t ok = 0;
  for (NodeId v : split.test) ok += oracle.predict({s.row(v).begin(), s.row(v).end()}) == pp.labels.at(v);
  const double oracle_acc = static_cast<double>(ok) / static_cast<double>(split.test.size());
  return {acc >= 0.85 && std::abs(acc - oracle_acc) <= 0.02,
          fmt("judge test accuracy %.4f, oracle %.4f on %zu test nodes", acc, oracle_acc, split.test.size())};
}

Outcome weak_supervision() {
  const auto corpus = synthetic_corpus(300, 50, 3, 8, 13);
  std::vector<PrefExample> prefs;
  CounterRng rng(1, 77);
  for (const auto& d : corpus.docs)
    prefs.push_back({d.text, d.label, static_cast<ClassId>((d.label + 1 + uniform_index(rng, 2)) % 3)});
  ToyConfig cfg;
  cfg.loss.lambda = 1.0;
  const auto [model, curve] = train_weakly_supervised({}, prefs, 3, cfg, 2);
  std::size_t ranked = 0;
  for (const auto& p : prefs) {
    const auto pr = predict_proba(model, p.text);
    ranked += pr[p.chosen] > pr[p.rejected];
  }
  const double rate = static_cast<double>(ranked) / static_cast<double>(prefs.size());

  const Vocabulary vocab({"a", "b", "c", "d"});
  std::size_t up = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    CounterRng r(trial, 9);
    const std::size_t classes = 2 + uniform_index(r, 5);
    auto m = random_model(vocab, classes, trial, 2.0);
    const auto w = static_cast<ClassId>(uniform_index(r, classes));
    const auto l = static_cast<ClassId>((w + 1 + uniform_index(r, classes - 1)) % classes);
    const std::vector<PrefExample> one{{"a b b d", w, l}};
    const auto batch = make_batch({}, one, vocab, classes);
    const auto before = predict_proba(m, batch.pref_x[0]);
    const auto g = combined_loss_and_grad(m, batch, LossConfig{1.0});
    auto wv = m.weights.values();
    auto dw = g.d_weights.values();
    for (std::size_t i = 0; i < wv.size(); ++i) wv[i] -= 1e-3 * dw[i];
    for (std::size_t c = 0; c < classes; ++c) m.bias[c] -= 1e-3 * g.d_bias[c];
    const auto after = predict_proba(m, batch.pref_x[0]);
    up += after[w] - after[l] > before[w] - before[l];
  }
  return {rate >= 0.9 && up == 100, fmt("chosen ranked first on %.1f%% of pairs, one-step direction %zu/100", 100 * rate, up)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget;  // seconds; 0 = none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"influence bound soundness and tree tightness", 30, influence_bound},
      {"agreement accuracy Monte Carlo and bound scan", 60, agreement_monte_carlo},
      {"gradient oracles", 0, gradient_oracles},
      {"tau trade-off", 0, tau_tradeoff},
      {"selection dominance", 0, selection_dominance},
      {"end-to-end toy pipeline", 60, end_to_end},
      {"judge sanity against logistic-regression oracle", 0, judge_sanity},
      {"weakly-supervised preference effect", 0, weak_supervision},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget > 0 && secs >= c.budget) {
      o.pass = false;
      o.detail += fmt(" [over the %.0f s budget]", c.budget);
    }
    failed += !o.pass;
    std::printf("%s %zu. %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed ? 1 : 0;
}

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

#include "colabel/toy_tag.hpp"

#include <array>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "colabel/error.hpp"
#include "colabel/generators.hpp"
#include "colabel/rng.hpp"

namespace colabel {

namespace {

using Pool = std::vector<std::string>;

const std::array<Pool, 3>& class_pools() {
  static const std::array<Pool, 3> pools{
      Pool{"neural", "network", "backpropagation", "hidden", "layer", "activation", "perceptron", "gradient",
           "convolutional", "weights"},
      Pool{"reward", "policy", "agent", "exploration", "markov", "action", "value", "bandit", "episode",
           "q-learning"},
      Pool{"theorem", "bound", "proof", "complexity", "lemma", "polynomial", "learnability", "dimension",
           "hardness", "sample"},
  };
  return pools;
}

const Pool& shared_pool() {
  static const Pool pool{"we", "propose", "method", "results", "paper", "show", "data", "model",
                         "approach", "experiments", "study", "new"};
  return pool;
}

const std::string& pick(const Pool& pool, CounterRng& rng) { return pool[uniform_index(rng, pool.size())]; }

// Keyword vote with deliberately inconsistent formatting.
std::string keyword_answer(const std::string& text, const LabelSpace& space, CounterRng& rng) {
  std::array<int, 3> votes{};
  std::istringstream words(text);
  for (std::string w; words >> w;) {
    for (std::size_t c = 0; c < 3; ++c)
      for (const auto& k : class_pools()[c]) votes[c] += w == k;
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < 3; ++c)
    if (votes[c] > votes[best]) best = c;
  std::size_t runner = best == 0 ? 1 : 0;
  for (std::size_t c = 0; c < 3; ++c)
    if (c != best && votes[c] > votes[runner]) runner = c;

  const double u = rng.uniform();
  if (u < 0.04) return "I am not sure which class this paper belongs to.";
  if (votes[best] == votes[runner]) return space.name(static_cast<ClassId>(best)) + " or " + space.name(static_cast<ClassId>(runner));
  std::string name = space.name(static_cast<ClassId>(best));
  // Confidently wrong now and then, so judge and predictor disagree.
  if (u < 0.16) return space.name(static_cast<ClassId>((best + 1 + (u < 0.1)) % 3));
  if (u < 0.35) return name;
  if (u < 0.55) {
    for (char& ch : name) ch = ch == '_' ? ' ' : static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return name + ".";
  }
  if (u < 0.78) return "The center node belongs to " + name;
  return "  " + name + "!\n";
}

}  // namespace

ToyTag make_toy_tag(const ToyTagOptions& options) {
  if (options.n < 30) throw Error("toy TAG needs at least 30 nodes");
  ToyTag tag;
  tag.space = LabelSpace({"Neural_Networks", "Reinforcement_Learning", "Theory"});
  auto planted = gen::planted_partition(options.n, 3, options.intra_prob, options.inter_prob, options.seed);
  tag.graph = std::move(planted.graph);
  tag.labels = std::move(planted.labels);

  Pool vocab;
  for (const auto& p : class_pools()) vocab.insert(vocab.end(), p.begin(), p.end());
  vocab.insert(vocab.end(), shared_pool().begin(), shared_pool().end());

  tag.features = FeatureMatrix(options.n, vocab.size());
  tag.texts.resize(options.n);
  tag.llm_raw.resize(options.n);
  for (std::size_t v = 0; v < options.n; ++v) {
    CounterRng rng(options.seed, 0x7e47 + v);
    const ClassId c = tag.labels.at(static_cast<NodeId>(v));
    const std::size_t length = 10 + uniform_index(rng, 9);
    std::string text;
    for (std::size_t i = 0; i < length; ++i) {
      const double u = rng.uniform();
      const std::string* w;
      if (u < 0.35) w = &pick(class_pools()[c], rng);
      else if (u < 0.55) w = &pick(class_pools()[uniform_index(rng, 3)], rng);
      else w = &pick(shared_pool(), rng);
      if (i) text.push_back(' ');
      text += *w;
      for (std::size_t k = 0; k < vocab.size(); ++k)
        if (vocab[k] == *w) tag.features(v, k) += 1.0;
    }
    tag.texts[v] = std::move(text);
    tag.llm_raw[v] = keyword_answer(tag.texts[v], tag.space, rng);
  }
  return tag;
}

void write_toy_tag(const ToyTag& tag, const std::filesystem::path& dir) {
  using nlohmann::json;
  std::filesystem::create_directories(dir);
  save_graph(tag.graph, dir / "graph.tsv");

  std::ostringstream features;
  char buf[32];
  for (std::size_t r = 0; r < tag.features.rows(); ++r) {
    for (std::size_t c = 0; c < tag.features.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", tag.features(r, c));
      features << (c ? "," : "") << buf;
    }
    features << '\n';
  }
  write_file(dir / "features.csv", features.str());

  std::ostringstream labels;
  write_labels(tag.labels, tag.space, labels);
  write_file(dir / "labels.csv", labels.str());
  write_file(dir / "label_space.json", json(tag.space.names()).dump() + "\n");

  std::string texts, preds;
  for (std::size_t v = 0; v < tag.texts.size(); ++v) {
    texts += json{{"node_id", v}, {"text", tag.texts[v]}}.dump() + "\n";
    preds += json{{"node_id", v}, {"label", tag.llm_raw[v]}}.dump() + "\n";
  }
  write_file(dir / "texts.jsonl", texts);
  write_file(dir / "llm_predictions.jsonl", preds);
}

}  // namespace colabel

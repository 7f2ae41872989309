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
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "colabel/dataset.hpp"
#include "colabel/matrix.hpp"
#include "colabel/objectives.hpp"

namespace colabel {

// Lowercased whitespace tokens.
std::vector<std::string> tokenize(std::string_view text);

class Vocabulary {
 public:
  Vocabulary() = default;
  // Tokens sorted alphabetically; duplicates are an error.
  explicit Vocabulary(std::vector<std::string> tokens);

  // Every token seen at least min_count times across texts.
  static Vocabulary build(std::span<const std::string> texts, std::size_t min_count = 2);

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::optional<std::uint32_t> index_of(std::string_view token) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// (vocab index, count), sorted by index.
using SparseCounts = std::vector<std::pair<std::uint32_t, double>>;

SparseCounts featurize(std::string_view text, const Vocabulary& vocab);
std::vector<double> to_dense(const SparseCounts& x, std::size_t dims);

struct ToyConfig {
  double learning_rate = 0.5;
  std::size_t epochs = 300;
  std::size_t patience = 50;   // only used with a validation set
  double init_scale = 0.0;     // 0 = zero init; otherwise N(0, init_scale^2) from the seed
  std::size_t min_token_count = 2;
  LossConfig loss;

  void validate() const;
};

struct ToyModel {
  Vocabulary vocab;
  std::size_t num_classes = 0;
  Matrix weights;  // V x C
  std::vector<double> bias;
  ToyConfig config;
  std::uint64_t seed = 0;

  static ToyModel zeros(Vocabulary vocab, std::size_t num_classes);
};

struct AgreeExample {
  std::string text;
  ClassId label = 0;
};

struct PrefExample {
  std::string text;
  ClassId chosen = 0;
  ClassId rejected = 0;
};

// Featurized examples against a fixed vocabulary.
struct ToyBatch {
  std::vector<SparseCounts> agree_x;
  std::vector<ClassId> agree_y;
  std::vector<SparseCounts> pref_x;
  std::vector<ClassId> chosen;
  std::vector<ClassId> rejected;
};

ToyBatch make_batch(std::span<const AgreeExample> agree, std::span<const PrefExample> prefs, const Vocabulary& vocab,
                    std::size_t num_classes);

struct TrainingCurve {
  std::vector<double> loss;
  std::vector<double> instruction;
  std::vector<double> preference;
  std::vector<double> val_accuracy;  // NaN when no validation set

  std::size_t size() const noexcept { return loss.size(); }
};

std::vector<double> predict_proba(const ToyModel& model, const SparseCounts& x);
std::vector<double> predict_proba(const ToyModel& model, std::string_view text);
ClassId predict(const ToyModel& model, std::string_view text);
double accuracy(const ToyModel& model, std::span<const AgreeExample> examples);

struct ToyGrad {
  CombinedLoss loss;
  Matrix d_weights;
  std::vector<double> d_bias;
};

ToyGrad combined_loss_and_grad(const ToyModel& model, const ToyBatch& batch, const LossConfig& config);

// Full-batch gradient descent on the combined objective. With a non-empty
// validation set training stops once val accuracy has not improved for
// `patience` epochs and the best parameters are returned.
std::pair<ToyModel, TrainingCurve> train_weakly_supervised(std::span<const AgreeExample> agree,
                                                           std::span<const PrefExample> prefs,
                                                           std::size_t num_classes, const ToyConfig& config,
                                                           std::uint64_t seed,
                                                           std::span<const AgreeExample> validation = {});

// Max elementwise relative error between analytic and central-difference
// parameter gradients. Entries where both are below `floor` in magnitude are
// compared absolutely.
double grad_check(const ToyModel& model, const ToyBatch& batch, const LossConfig& config, double epsilon = 1e-5,
                  double floor = 1e-8);

void write_curve_csv(const TrainingCurve& curve, std::ostream& out);
std::string toy_to_json(const ToyModel& model);
ToyModel toy_from_json(const std::string& text, const std::string& source_name = "<toy model>");

// Documents drawn from per-class disjoint token pools plus a few shared
// tokens, so a linear model can separate them.
struct SyntheticCorpus {
  std::vector<AgreeExample> docs;
  std::size_t num_classes = 0;
};

SyntheticCorpus synthetic_corpus(std::size_t docs, std::size_t vocab_size, std::size_t num_classes,
                                 std::size_t doc_length, std::uint64_t seed);

}  // namespace colabel

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
#include <span>
#include <string>
#include <vector>

#include "colabel/dataset.hpp"
#include "colabel/graph.hpp"
#include "colabel/matrix.hpp"

namespace colabel {

// n_nodes x C class probabilities, rows summing to one.
using ProbMatrix = Matrix;

struct JudgeHyper {
  std::size_t hops = 2;
  double learning_rate = 0.2;
  double weight_decay = 5e-4;
  std::size_t max_epochs = 200;
  std::size_t patience = 100;
};

// Linear softmax classifier over propagated features.
struct JudgeModel {
  JudgeHyper hyper;
  std::uint64_t seed = 0;
  Matrix weights;  // F x C
  std::vector<double> bias;
  std::size_t epochs_run = 0;
  double best_val_accuracy = 0.0;

  std::size_t num_features() const noexcept { return weights.rows(); }
  std::size_t num_classes() const noexcept { return weights.cols(); }
};

// S^hops X with S = D~^-1/2 (A + I) D~^-1/2. Self-loops are added here only;
// the influence bound works on the plain row-normalized adjacency instead.
FeatureMatrix propagate(const FeatureMatrix& features, const Graph& graph, std::size_t hops);

struct JudgeLoss {
  double loss = 0.0;  // mean cross-entropy + weight_decay / 2 * ||W||^2
  Matrix grad_weights;
  std::vector<double> grad_bias;
};

// Full-batch loss and analytic gradient over `rows`. Bias is not decayed.
JudgeLoss judge_loss_and_grad(const Matrix& weights, std::span<const double> bias, const FeatureMatrix& x,
                              std::span<const NodeId> rows, const LabelAssignment& labels, double weight_decay);

// Full-batch gradient descent from zero weights with a proximal L2 step
// W <- (W - lr * grad_ce) / (1 + lr * decay), which has the same fixed point as
// plain decay but stays stable for any decay. Keeps the parameters from the
// last epoch reaching the best validation accuracy and stops after `patience`
// epochs without a strict improvement. Throws on a non-finite loss, naming the epoch.
JudgeModel train_judge(const FeatureMatrix& smoothed, const Split& split, const LabelAssignment& labels,
                       std::size_t num_classes, const JudgeHyper& hyper, std::uint64_t seed);

// Row-wise softmax(X W + b), rows evaluated in parallel.
ProbMatrix predict_proba(const JudgeModel& model, const FeatureMatrix& smoothed);

// Index of the largest entry, lowest index on ties.
ClassId argmax(std::span<const double> row);
std::vector<ClassId> argmax_rows(const ProbMatrix& probs);

// Throws unless every entry is in [0, 1] and every row sums to 1 within 1e-6.
void validate_prob_matrix(const ProbMatrix& probs);

double accuracy(const ProbMatrix& probs, std::span<const NodeId> nodes, const LabelAssignment& labels);

std::string judge_to_json(const JudgeModel& model);
JudgeModel judge_from_json(const std::string& text, const std::string& source_name = "<judge>");

// CSV "node_id,p_0,...,p_{C-1}", one row per node in id order. Also the import
// format for probabilities computed by an external judge.
void write_probs_csv(const ProbMatrix& probs, std::ostream& out);
ProbMatrix read_probs_csv(std::istream& in, std::size_t n_nodes, std::size_t num_classes,
                          const std::string& source_name = "<probs>");

namespace reference {

// Edge-by-edge scatter formulation of propagate(); equal up to summation order.
FeatureMatrix propagate(const FeatureMatrix& features, const Graph& graph, std::size_t hops);

// Sequential predict_proba(); must match the parallel version exactly.
ProbMatrix predict_proba(const JudgeModel& model, const FeatureMatrix& smoothed);

}  // namespace reference

}  // namespace colabel

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
#include <span>
#include <string>
#include <vector>

#include "colabel/dataset.hpp"
#include "colabel/judge.hpp"

namespace colabel {

// A hard label, or the reason there is none.
struct Prediction {
  enum class Kind : std::uint8_t { missing, unparsed, parsed };

  Kind kind = Kind::missing;
  ClassId label = 0;

  static Prediction of(ClassId c) { return {Kind::parsed, c}; }
  static Prediction unparsed() { return {Kind::unparsed, 0}; }

  bool parsed() const noexcept { return kind == Kind::parsed; }
  bool operator==(const Prediction&) const = default;
};

// Per-node predictions of one annotator, indexed by node id.
struct PredictionSet {
  std::vector<Prediction> labels;
  std::optional<ProbMatrix> probs;

  // Hard labels are the row argmax (lowest class on ties).
  static PredictionSet from_probs(ProbMatrix probs);

  // Throws if a parsed label disagrees with its probability row's argmax.
  void validate() const;
};

struct ScoredNode {
  NodeId node = 0;
  ClassId gnn = 0;
  ClassId llm = 0;
  double pref_score = 0.0;
};

struct PartitionResult {
  std::vector<NodeId> selected;
  std::vector<NodeId> agreed;            // ascending id
  std::vector<ScoredNode> disagreed;     // ascending id
  std::vector<NodeId> unparsed;          // LLM output unparseable; in neither set
  std::vector<ScoredNode> filtered;      // pref_score >= tau, descending score then ascending id
  double tau = 0.7;
};

struct AgreementSplit {
  std::vector<NodeId> agreed;
  std::vector<NodeId> disagreed;
  std::vector<NodeId> unparsed;
};

// Splits the selected nodes by whether the judge and the text predictor agree.
// Throws, listing node ids, if either side lacks a prediction for a selected node.
AgreementSplit partition_agreement(const PredictionSet& gnn, const PredictionSet& llm, std::span<const NodeId> selected);

// P(gnn | v) - P(llm | v). Requires gnn != llm and argmax(row) == gnn.
double preference_score(std::span<const double> prob_row, ClassId gnn_label, ClassId llm_label);

// Disagreed nodes with preference score >= tau, strongest first.
std::vector<ScoredNode> filter_disagreement(std::span<const NodeId> disagreed, const ProbMatrix& probs,
                                            const PredictionSet& gnn, const PredictionSet& llm, double tau);

// partition + preference scores for every disagreed node + filtering.
PartitionResult co_label(const PredictionSet& gnn, const PredictionSet& llm, std::span<const NodeId> selected,
                         double tau);

struct AgreementBound {
  double value = 0.0;
  bool exceeds_max = false;  // value > max(p_llm, p_gnn)
  bool degenerate = false;   // an accuracy was exactly 0 or 1
};

// p_l p_g / (p_l p_g + (1 - p_l)(1 - p_g) / (C - 1)): accuracy of the agreement
// set when both annotators err independently and uniformly over wrong classes.
AgreementBound agreement_accuracy_bound(double p_llm, double p_gnn, std::size_t num_classes);

struct ErrorCorrelation {
  std::size_t evaluated = 0;
  double gnn_error_rate = 0.0;
  double llm_error_rate = 0.0;
  std::optional<double> pearson;            // nullopt when an indicator has zero variance
  std::optional<double> delta_llm_given_gnn;  // P(L err | G err) - P(L err)
  std::optional<double> delta_gnn_given_llm;
};

// Over `nodes` with known truth and parsed labels on both sides.
ErrorCorrelation error_correlation(const PredictionSet& gnn, const PredictionSet& llm, const LabelAssignment& truth,
                                   std::span<const NodeId> nodes);

// JSON report: counts always, accuracies and diagnostics only when truth is given.
std::string build_report(const PartitionResult& result, const PredictionSet& gnn, const PredictionSet& llm,
                         std::size_t num_classes, const LabelAssignment* truth,
                         std::span<const std::string> warnings = {});

std::string partition_to_json(const PartitionResult& result);
PartitionResult partition_from_json(const std::string& text, const std::string& source_name = "<partition>");

}  // namespace colabel

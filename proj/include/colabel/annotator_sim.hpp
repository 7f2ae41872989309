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
#include <vector>

#include "colabel/agreement.hpp"
#include "colabel/dataset.hpp"
#include "colabel/judge.hpp"

namespace colabel {

struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;
};

struct SimConfig {
  std::size_t n = 200000;
  std::size_t num_classes = 7;
  double p_llm = 0.8;
  double p_gnn = 0.7;
  BetaParams confidence_correct{8.0, 2.0};  // judge top-class mass when right
  BetaParams confidence_wrong{2.0, 2.0};    // ... and when wrong
  std::uint64_t seed = 0;

  // Correlated mode. A node is "hard" with probability hard_fraction; both
  // annotators lose hard_penalty accuracy on hard nodes and gain enough on
  // easy ones that the marginal accuracies stay at p_llm / p_gnn.
  double hard_fraction = 0.0;
  double hard_penalty = 0.0;

  void validate() const;
  // Human-readable notes for settings outside the usual regime (p <= 1/C).
  std::vector<std::string> warnings() const;
};

struct SimResult {
  SimConfig config;
  std::vector<ClassId> truth;
  std::vector<ClassId> llm_pred;
  std::vector<ClassId> gnn_pred;
  ProbMatrix gnn_probs;  // n x C, argmax == gnn_pred

  PredictionSet gnn_predictions() const;
  PredictionSet llm_predictions() const;
  LabelAssignment truth_labels() const;
  std::vector<NodeId> all_nodes() const;
};

// Per-node streams from a counter-based generator, filled in parallel.
SimResult simulate(const SimConfig& config);

namespace reference {
SimResult simulate(const SimConfig& config);
}

struct SimEvaluation {
  std::size_t agreed = 0;
  std::size_t disagreed = 0;
  std::size_t filtered = 0;
  double agreement_accuracy = 0.0;  // NaN when nothing agreed
  double llm_accuracy = 0.0;        // over all nodes
  double gnn_accuracy = 0.0;
  double final_accuracy = 0.0;      // agreed + filtered disagreed (judge labels); NaN if empty
  double final_llm_accuracy = 0.0;  // LLM labels on the same final nodes
  double final_gnn_accuracy = 0.0;  // judge labels on the same final nodes
  double analytic_bound = 0.0;
};

SimEvaluation evaluate(const SimResult& result, double tau);

struct TauRow {
  double tau = 0.0;
  std::size_t size = 0;
  std::optional<double> accuracy;  // judge accuracy on the filtered set; empty when size == 0
};

// Filters the disagreement set at each tau. Throws if nobody disagreed.
std::vector<TauRow> tau_sweep(const SimResult& result, std::span<const double> taus);
void write_tau_sweep_csv(std::span<const TauRow> rows, std::ostream& out);

struct ScanCell {
  double p_llm = 0.0;
  double p_gnn = 0.0;
  double bound = 0.0;
  double empirical = 0.0;  // agreement accuracy
  double sigma = 0.0;      // binomial sd of the agreement accuracy at the bound
  std::size_t agreed = 0;
  bool below_chance = false;  // dominance over max(p) not asserted
  bool violation = false;
};

struct ScanReport {
  std::size_t num_classes = 0;
  std::size_t n = 0;
  std::vector<ScanCell> cells;
  std::size_t violations() const;
};

// Simulates every (p_llm, p_gnn) cell and flags cells whose agreement
// accuracy falls more than 3 sigma below the bound, or below max(p) when both
// accuracies beat chance. base supplies n, C, seed and the confidence model.
ScanReport bound_violation_scan(std::span<const double> p_llm, std::span<const double> p_gnn, const SimConfig& base);
std::string scan_to_json(const ScanReport& report);

}  // namespace colabel

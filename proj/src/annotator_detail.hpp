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

#include <algorithm>
#include <random>

#include "colabel/annotator_sim.hpp"
#include "colabel/rng.hpp"

namespace colabel::detail {

inline double sample_beta(CounterRng& rng, const BetaParams& b) {
  // Fresh distributions per draw: std::normal_distribution inside gamma caches
  // a spare value, which would leak state between nodes.
  std::gamma_distribution<double> ga(b.alpha, 1.0);
  std::gamma_distribution<double> gb(b.beta, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

inline ClassId noisy_label(CounterRng& rng, ClassId truth, double p, std::size_t classes) {
  if (rng.uniform() < p) return truth;
  return static_cast<ClassId>((truth + 1 + uniform_index(rng, classes - 1)) % classes);
}

// Everything about node v comes from stream v, so any visiting order gives
// the same result.
inline void simulate_node(const SimConfig& cfg, NodeId v, SimResult& out) {
  CounterRng rng(cfg.seed, v);
  const std::size_t classes = cfg.num_classes;
  const bool hard = rng.uniform() < cfg.hard_fraction;
  const double shift = hard ? -cfg.hard_penalty * (1.0 - cfg.hard_fraction) : cfg.hard_penalty * cfg.hard_fraction;

  const auto truth = static_cast<ClassId>(uniform_index(rng, classes));
  const ClassId llm = noisy_label(rng, truth, cfg.p_llm + shift, classes);
  const ClassId gnn = noisy_label(rng, truth, cfg.p_gnn + shift, classes);
  double mass = sample_beta(rng, gnn == truth ? cfg.confidence_correct : cfg.confidence_wrong);
  mass = std::clamp(mass, 1e-9, 1.0);  // keep the judge's label the strict argmax

  const double c = static_cast<double>(classes);
  const double top = 1.0 / c + (1.0 - 1.0 / c) * mass;
  const double rest = (1.0 - top) / (c - 1.0);
  auto row = out.gnn_probs.row(v);
  double sum = 0.0;
  for (std::size_t k = 0; k < classes; ++k) sum += (row[k] = k == gnn ? top : rest);
  for (auto& x : row) x /= sum;

  out.truth[v] = truth;
  out.llm_pred[v] = llm;
  out.gnn_pred[v] = gnn;
}

inline SimResult empty_result(const SimConfig& cfg) {
  SimResult r;
  r.config = cfg;
  r.truth.resize(cfg.n);
  r.llm_pred.resize(cfg.n);
  r.gnn_pred.resize(cfg.n);
  r.gnn_probs = ProbMatrix(cfg.n, cfg.num_classes);
  return r;
}

}  // namespace colabel::detail

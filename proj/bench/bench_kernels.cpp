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

// Serial reference kernels against their OpenMP versions.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include <CLI11.hpp>
#include <omp.h>

#include "colabel/annotator_sim.hpp"
#include "colabel/generators.hpp"
#include "colabel/influence.hpp"
#include "colabel/judge.hpp"

using namespace colabel;

namespace {

double best_of(int reps, const std::function<void()>& fn) {
  double best = INFINITY;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

bool failed = false;

void row(const char* name, double serial, double parallel, bool same) {
  std::printf("%-18s %10.4f %10.4f %8.2fx  %s\n", name, serial, parallel, serial / parallel, same ? "match" : "MISMATCH");
  failed = failed || !same;
}

bool same_matrix(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (std::abs(a(i, j) - b(i, j)) > tol) return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernel benchmark"};
  std::size_t n = 20000, dims = 64, classes = 7, sources = 70, sim_n = 200000;
  int reps = 3;
  app.add_option("--nodes", n)->capture_default_str();
  app.add_option("--dims", dims)->capture_default_str();
  app.add_option("--sources", sources)->capture_default_str();
  app.add_option("--sim-n", sim_n)->capture_default_str();
  app.add_option("--reps", reps)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const double intra = 8.0 / (static_cast<double>(n) / static_cast<double>(classes));
  const double inter = 2.0 / static_cast<double>(n);
  auto pp = gen::planted_partition(n, classes, intra, inter, 1);
  const Graph& g = pp.graph;
  const FeatureMatrix x = gen::class_correlated_features(pp.labels, classes, dims, 1.0, 2);
  std::printf("graph: %zu nodes, %zu edges; %d threads\n\n", g.num_nodes(), g.num_edges(), omp_get_max_threads());
  std::printf("%-18s %10s %10s %9s\n", "kernel", "serial s", "omp s", "speedup");

  std::vector<NodeId> src;
  for (std::size_t i = 0; i < sources; ++i) src.push_back(static_cast<NodeId>(i * (n / sources)));
  const auto cand = complement_nodes(n, src);
  InfluenceScoreTable ts, tp;
  const double a = best_of(reps, [&] { ts = reference::influence_scores(g, src, cand); });
  const double b = best_of(reps, [&] { tp = influence_scores(g, src, cand); });
  bool same = ts.entries.size() == tp.entries.size();
  for (std::size_t i = 0; same && i < ts.entries.size(); ++i)
    same = ts.entries[i].log_score == tp.entries[i].log_score && ts.entries[i].best_source == tp.entries[i].best_source;
  row("influence_scores", a, b, same);

  FeatureMatrix ps, pq;
  const double c = best_of(reps, [&] { ps = reference::propagate(x, g, 2); });
  const double d = best_of(reps, [&] { pq = propagate(x, g, 2); });
  row("propagate", c, d, same_matrix(ps, pq, 1e-12));

  JudgeModel model;
  model.weights = Matrix(dims, classes);
  model.bias.assign(classes, 0.1);
  for (std::size_t i = 0; i < dims; ++i)
    for (std::size_t j = 0; j < classes; ++j) model.weights(i, j) = std::sin(static_cast<double>(i * classes + j));
  ProbMatrix qs, qp;
  const double e = best_of(reps, [&] { qs = reference::predict_proba(model, pq); });
  const double f = best_of(reps, [&] { qp = predict_proba(model, pq); });
  row("predict_proba", e, f, same_matrix(qs, qp, 0.0));

  SimConfig sc;
  sc.n = sim_n;
  sc.seed = 9;
  SimResult ss, sp;
  const double h = best_of(reps, [&] { ss = reference::simulate(sc); });
  const double k = best_of(reps, [&] { sp = simulate(sc); });
  row("simulate", h, k, ss.llm_pred == sp.llm_pred && ss.gnn_pred == sp.gnn_pred && same_matrix(ss.gnn_probs, sp.gnn_probs, 0.0));

  return failed ? 1 : 0;
}

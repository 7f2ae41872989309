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

#include "colabel/annotator_sim.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "annotator_detail.hpp"
#include "colabel/error.hpp"

namespace colabel {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool in_unit(double p) { return p >= 0.0 && p <= 1.0; }

void check_beta(const BetaParams& b, const char* what) {
  if (!(b.alpha > 0.0 && b.beta > 0.0) || !std::isfinite(b.alpha) || !std::isfinite(b.beta))
    throw Error(std::string(what) + " Beta parameters must be positive and finite");
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? kNaN : static_cast<double>(num) / static_cast<double>(den);
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

void SimConfig::validate() const {
  if (n == 0) throw Error("simulation needs n >= 1");
  if (n > std::numeric_limits<NodeId>::max()) throw Error("simulation n exceeds the node id range");
  if (num_classes < 2) throw Error("simulation needs at least 2 classes");
  if (!in_unit(p_llm) || !in_unit(p_gnn)) throw Error("annotator accuracies must lie in [0, 1]");
  check_beta(confidence_correct, "confidence_correct");
  check_beta(confidence_wrong, "confidence_wrong");
  if (!in_unit(hard_fraction)) throw Error("hard_fraction must lie in [0, 1]");
  if (!(hard_penalty >= 0.0) || !std::isfinite(hard_penalty)) throw Error("hard_penalty must be >= 0");
  for (double p : {p_llm, p_gnn}) {
    if (!in_unit(p - hard_penalty * (1.0 - hard_fraction)) || !in_unit(p + hard_penalty * hard_fraction))
      throw Error("hard_penalty pushes an annotator accuracy outside [0, 1]");
  }
}

std::vector<std::string> SimConfig::warnings() const {
  std::vector<std::string> out;
  const double chance = 1.0 / static_cast<double>(num_classes);
  if (p_llm <= chance) out.push_back("p_llm is at or below chance (1/C)");
  if (p_gnn <= chance) out.push_back("p_gnn is at or below chance (1/C)");
  if (p_llm == 1.0 || p_gnn == 1.0) out.push_back("an annotator is perfect; the agreement bound is degenerate");
  return out;
}

PredictionSet SimResult::gnn_predictions() const { return PredictionSet::from_probs(gnn_probs); }

PredictionSet SimResult::llm_predictions() const {
  PredictionSet p;
  p.labels.reserve(llm_pred.size());
  for (ClassId c : llm_pred) p.labels.push_back(Prediction::of(c));
  return p;
}

LabelAssignment SimResult::truth_labels() const {
  LabelAssignment a;
  a.labels.assign(truth.begin(), truth.end());
  return a;
}

std::vector<NodeId> SimResult::all_nodes() const {
  std::vector<NodeId> out(truth.size());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = static_cast<NodeId>(v);
  return out;
}

SimResult simulate(const SimConfig& config) {
  config.validate();
  SimResult out = detail::empty_result(config);
  const auto n = static_cast<std::ptrdiff_t>(config.n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t v = 0; v < n; ++v) detail::simulate_node(config, static_cast<NodeId>(v), out);
  return out;
}

SimEvaluation evaluate(const SimResult& result, double tau) {
  const auto gnn = result.gnn_predictions();
  const auto llm = result.llm_predictions();
  const auto nodes = result.all_nodes();
  const auto part = co_label(gnn, llm, nodes, tau);

  SimEvaluation e;
  e.agreed = part.agreed.size();
  e.disagreed = part.disagreed.size();
  e.filtered = part.filtered.size();

  std::size_t agree_ok = 0;
  for (NodeId v : part.agreed) agree_ok += result.gnn_pred[v] == result.truth[v];
  e.agreement_accuracy = ratio(agree_ok, e.agreed);

  std::size_t llm_ok = 0, gnn_ok = 0;
  for (NodeId v : nodes) {
    llm_ok += result.llm_pred[v] == result.truth[v];
    gnn_ok += result.gnn_pred[v] == result.truth[v];
  }
  e.llm_accuracy = ratio(llm_ok, nodes.size());
  e.gnn_accuracy = ratio(gnn_ok, nodes.size());

  std::size_t final_ok = agree_ok, final_llm_ok = agree_ok, final_gnn_ok = agree_ok;
  for (const auto& s : part.filtered) {
    const bool g = result.gnn_pred[s.node] == result.truth[s.node];
    final_ok += g;
    final_gnn_ok += g;
    final_llm_ok += result.llm_pred[s.node] == result.truth[s.node];
  }
  const std::size_t final_size = e.agreed + e.filtered;
  e.final_accuracy = ratio(final_ok, final_size);
  e.final_llm_accuracy = ratio(final_llm_ok, final_size);
  e.final_gnn_accuracy = ratio(final_gnn_ok, final_size);
  e.analytic_bound = agreement_accuracy_bound(result.config.p_llm, result.config.p_gnn, result.config.num_classes).value;
  return e;
}

std::vector<TauRow> tau_sweep(const SimResult& result, std::span<const double> taus) {
  const auto gnn = result.gnn_predictions();
  const auto llm = result.llm_predictions();
  const auto nodes = result.all_nodes();
  const auto split = partition_agreement(gnn, llm, nodes);
  if (split.disagreed.empty()) throw Error("tau sweep: the disagreement set is empty");

  std::vector<TauRow> rows;
  for (double tau : taus) {
    const auto kept = filter_disagreement(split.disagreed, result.gnn_probs, gnn, llm, tau);
    TauRow row{tau, kept.size(), std::nullopt};
    if (!kept.empty()) {
      std::size_t ok = 0;
      for (const auto& s : kept) ok += s.gnn == result.truth[s.node];
      row.accuracy = ratio(ok, kept.size());
    }
    rows.push_back(row);
  }
  return rows;
}

void write_tau_sweep_csv(std::span<const TauRow> rows, std::ostream& out) {
  out << "tau,size,accuracy\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.tau);
    out << buf << ',' << r.size << ',';
    if (r.accuracy) {
      std::snprintf(buf, sizeof buf, "%.17g", *r.accuracy);
      out << buf;
    }
    out << '\n';
  }
}

std::size_t ScanReport::violations() const {
  std::size_t k = 0;
  for (const auto& c : cells) k += c.violation;
  return k;
}

ScanReport bound_violation_scan(std::span<const double> p_llm, std::span<const double> p_gnn, const SimConfig& base) {
  ScanReport report;
  report.num_classes = base.num_classes;
  report.n = base.n;
  const double chance = 1.0 / static_cast<double>(base.num_classes);
  std::uint64_t cell_index = 0;
  for (double pl : p_llm) {
    for (double pg : p_gnn) {
      SimConfig cfg = base;
      cfg.p_llm = pl;
      cfg.p_gnn = pg;
      cfg.seed = mix64(base.seed + ++cell_index);
      const SimResult r = simulate(cfg);

      ScanCell cell;
      cell.p_llm = pl;
      cell.p_gnn = pg;
      cell.bound = agreement_accuracy_bound(pl, pg, base.num_classes).value;
      std::size_t ok = 0;
      for (std::size_t v = 0; v < cfg.n; ++v) {
        if (r.llm_pred[v] != r.gnn_pred[v]) continue;
        ++cell.agreed;
        ok += r.gnn_pred[v] == r.truth[v];
      }
      cell.empirical = ratio(ok, cell.agreed);
      cell.below_chance = pl <= chance || pg <= chance;
      if (cell.agreed > 0) {
        cell.sigma = std::sqrt(cell.bound * (1.0 - cell.bound) / static_cast<double>(cell.agreed));
        const double slack = 3.0 * cell.sigma;
        cell.violation = cell.empirical < cell.bound - slack;
        if (!cell.below_chance) cell.violation = cell.violation || cell.empirical < std::max(pl, pg) - slack;
      }
      report.cells.push_back(cell);
    }
  }
  return report;
}

std::string scan_to_json(const ScanReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"p_llm", c.p_llm},
                     {"p_gnn", c.p_gnn},
                     {"bound", c.bound},
                     {"empirical", number_or_null(c.empirical)},
                     {"sigma", c.sigma},
                     {"agreed", c.agreed},
                     {"below_chance", c.below_chance},
                     {"violation", c.violation}});
  }
  json j{{"num_classes", report.num_classes}, {"n", report.n}, {"violations", report.violations()}, {"cells", cells}};
  return j.dump(2) + "\n";
}

}  // namespace colabel

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

#include "colabel/judge.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "colabel/error.hpp"
#include "judge_detail.hpp"

namespace colabel {

using nlohmann::json;

namespace {

std::vector<double> inverse_sqrt_degrees(const Graph& graph) {
  std::vector<double> out(graph.num_nodes());
  for (NodeId v = 0; v < graph.num_nodes(); ++v) out[v] = 1.0 / std::sqrt(static_cast<double>(graph.degree(v)) + 1.0);
  return out;
}

void check_hyper(const JudgeHyper& h) {
  if (!(h.learning_rate > 0.0) || !std::isfinite(h.learning_rate)) throw Error("judge learning rate must be > 0");
  if (!(h.weight_decay >= 0.0) || !std::isfinite(h.weight_decay)) throw Error("judge weight decay must be >= 0");
  if (h.max_epochs == 0) throw Error("judge max_epochs must be >= 1");
  if (h.patience == 0) throw Error("judge patience must be >= 1");
}

}  // namespace

FeatureMatrix propagate(const FeatureMatrix& features, const Graph& graph, std::size_t hops) {
  if (features.rows() != graph.num_nodes()) throw Error("feature rows do not match graph nodes");
  const auto inv_sqrt = inverse_sqrt_degrees(graph);
  const std::size_t cols = features.cols();
  FeatureMatrix current = features;
  FeatureMatrix next(features.rows(), cols);
  const auto n = static_cast<std::ptrdiff_t>(graph.num_nodes());
  for (std::size_t hop = 0; hop < hops; ++hop) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto v = static_cast<NodeId>(i);
      auto out = next.row(v);
      auto self = current.row(v);
      const double self_w = inv_sqrt[v] * inv_sqrt[v];
      for (std::size_t f = 0; f < cols; ++f) out[f] = self_w * self[f];
      for (NodeId u : graph.neighbors(v)) {
        const double w = inv_sqrt[v] * inv_sqrt[u];
        auto in = current.row(u);
        for (std::size_t f = 0; f < cols; ++f) out[f] += w * in[f];
      }
    }
    std::swap(current, next);
  }
  return current;
}

JudgeLoss judge_loss_and_grad(const Matrix& weights, std::span<const double> bias, const FeatureMatrix& x,
                              std::span<const NodeId> rows, const LabelAssignment& labels, double weight_decay) {
  if (rows.empty()) throw Error("judge loss needs at least one training row");
  const std::size_t classes = weights.cols();
  JudgeLoss out;
  out.grad_weights = Matrix(weights.rows(), classes);
  out.grad_bias.assign(classes, 0.0);
  std::vector<double> p(classes);
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  for (NodeId v : rows) {
    const ClassId y = labels.at(v);
    auto xv = x.row(v);
    detail::softmax_row(weights, bias, xv, p);
    out.loss -= std::log(std::max(p[y], 1e-300)) * inv_n;
    p[y] -= 1.0;
    for (std::size_t c = 0; c < classes; ++c) out.grad_bias[c] += p[c] * inv_n;
    for (std::size_t f = 0; f < xv.size(); ++f) {
      if (xv[f] == 0.0) continue;
      auto g = out.grad_weights.row(f);
      for (std::size_t c = 0; c < classes; ++c) g[c] += xv[f] * p[c] * inv_n;
    }
  }
  double sq = 0.0;
  for (double w : weights.values()) sq += w * w;
  out.loss += 0.5 * weight_decay * sq;
  auto gw = out.grad_weights.values();
  auto w = weights.values();
  for (std::size_t i = 0; i < gw.size(); ++i) gw[i] += weight_decay * w[i];
  return out;
}

JudgeModel train_judge(const FeatureMatrix& smoothed, const Split& split, const LabelAssignment& labels,
                       std::size_t num_classes, const JudgeHyper& hyper, std::uint64_t seed) {
  check_hyper(hyper);
  if (split.train.empty()) throw Error("judge training set is empty");
  if (num_classes < 2) throw Error("judge needs at least 2 classes");
  for (NodeId v : split.train) {
    if (v >= smoothed.rows()) throw Error("train node " + std::to_string(v) + " out of range");
    if (!labels.known(v)) throw Error("train node " + std::to_string(v) + " is unlabeled");
    if (labels.at(v) >= num_classes) throw Error("train label out of range");
  }

  JudgeModel model;
  model.hyper = hyper;
  model.seed = seed;
  model.weights = Matrix(smoothed.cols(), num_classes);
  model.bias.assign(num_classes, 0.0);

  JudgeModel best = model;
  double best_acc = -1.0;
  std::size_t since_best = 0;
  const double lr = hyper.learning_rate;
  const double shrink = 1.0 / (1.0 + lr * hyper.weight_decay);

  for (std::size_t epoch = 1; epoch <= hyper.max_epochs; ++epoch) {
    // Cross-entropy gradient only; decay is applied by the proximal shrink.
    JudgeLoss lg = judge_loss_and_grad(model.weights, model.bias, smoothed, split.train, labels, 0.0);
    double sq = 0.0;
    for (double w : model.weights.values()) sq += w * w;
    const double loss = lg.loss + 0.5 * hyper.weight_decay * sq;
    if (!std::isfinite(loss)) throw Error("judge training diverged: non-finite loss at epoch " + std::to_string(epoch));

    auto w = model.weights.values();
    auto g = lg.grad_weights.values();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = (w[i] - lr * g[i]) * shrink;
    for (std::size_t c = 0; c < num_classes; ++c) model.bias[c] -= lr * lg.grad_bias[c];
    model.epochs_run = epoch;

    if (split.val.empty()) continue;
    double acc = accuracy(reference::predict_proba(model, smoothed), split.val, labels);
    // A tie moves the kept model forward (small validation sets plateau
    // after a handful of epochs); only a strict gain resets patience.
    const bool gain = acc > best_acc;
    if (acc >= best_acc) {
      best_acc = acc;
      best = model;
      best.best_val_accuracy = acc;
    }
    if (gain) since_best = 0;
    else if (++since_best >= hyper.patience) break;
  }
  if (split.val.empty()) return model;
  best.epochs_run = model.epochs_run;
  return best;
}

ProbMatrix predict_proba(const JudgeModel& model, const FeatureMatrix& smoothed) {
  if (smoothed.cols() != model.num_features()) {
    throw Error("feature dimension " + std::to_string(smoothed.cols()) + " does not match judge (" +
                std::to_string(model.num_features()) + ")");
  }
  ProbMatrix out(smoothed.rows(), model.num_classes());
  const auto n = static_cast<std::ptrdiff_t>(smoothed.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    detail::softmax_row(model.weights, model.bias, smoothed.row(r), out.row(r));
  }
  return out;
}

ClassId argmax(std::span<const double> row) {
  ClassId best = 0;
  for (std::size_t c = 1; c < row.size(); ++c) {
    if (row[c] > row[best]) best = static_cast<ClassId>(c);
  }
  return best;
}

std::vector<ClassId> argmax_rows(const ProbMatrix& probs) {
  std::vector<ClassId> out(probs.rows());
  for (std::size_t r = 0; r < probs.rows(); ++r) out[r] = argmax(probs.row(r));
  return out;
}

void validate_prob_matrix(const ProbMatrix& probs) {
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    double sum = 0.0;
    for (double p : probs.row(r)) {
      if (!(p >= 0.0 && p <= 1.0)) throw Error("probability row " + std::to_string(r) + " has an entry outside [0, 1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6) throw Error("probability row " + std::to_string(r) + " does not sum to 1");
  }
}

double accuracy(const ProbMatrix& probs, std::span<const NodeId> nodes, const LabelAssignment& labels) {
  if (nodes.empty()) return 0.0;
  std::size_t correct = 0;
  for (NodeId v : nodes) {
    if (labels.known(v) && argmax(probs.row(v)) == labels.at(v)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(nodes.size());
}

std::string judge_to_json(const JudgeModel& model) {
  json j;
  j["hops"] = model.hyper.hops;
  j["num_features"] = model.num_features();
  j["num_classes"] = model.num_classes();
  j["weights"] = std::vector<double>(model.weights.values().begin(), model.weights.values().end());
  j["bias"] = model.bias;
  j["hyperparameters"] = {{"learning_rate", model.hyper.learning_rate},
                          {"weight_decay", model.hyper.weight_decay},
                          {"max_epochs", model.hyper.max_epochs},
                          {"patience", model.hyper.patience}};
  j["seed"] = model.seed;
  j["epochs_run"] = model.epochs_run;
  j["best_val_accuracy"] = model.best_val_accuracy;
  return j.dump(2) + "\n";
}

JudgeModel judge_from_json(const std::string& text, const std::string& source_name) {
  try {
    json j = json::parse(text);
    JudgeModel m;
    m.hyper.hops = j.at("hops").get<std::size_t>();
    const auto& h = j.at("hyperparameters");
    m.hyper.learning_rate = h.at("learning_rate").get<double>();
    m.hyper.weight_decay = h.at("weight_decay").get<double>();
    m.hyper.max_epochs = h.at("max_epochs").get<std::size_t>();
    m.hyper.patience = h.at("patience").get<std::size_t>();
    m.seed = j.value("seed", std::uint64_t{0});
    m.epochs_run = j.value("epochs_run", std::size_t{0});
    m.best_val_accuracy = j.value("best_val_accuracy", 0.0);
    auto rows = j.at("num_features").get<std::size_t>();
    auto cols = j.at("num_classes").get<std::size_t>();
    auto w = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<std::vector<double>>();
    if (w.size() != rows * cols || m.bias.size() != cols) throw ParseError(source_name, 0, "weight shape mismatch");
    m.weights = Matrix(rows, cols);
    std::copy(w.begin(), w.end(), m.weights.values().begin());
    for (double x : w)
      if (!std::isfinite(x)) throw ParseError(source_name, 0, "non-finite weight");
    return m;
  } catch (const json::exception& e) {
    throw ParseError(source_name, 0, e.what());
  }
}

void write_probs_csv(const ProbMatrix& probs, std::ostream& out) {
  out << "node_id";
  for (std::size_t c = 0; c < probs.cols(); ++c) out << ",p_" << c;
  out << '\n';
  char buf[40];
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    out << r;
    for (double p : probs.row(r)) {
      std::snprintf(buf, sizeof(buf), "%.17g", p);
      out << ',' << buf;
    }
    out << '\n';
  }
}

ProbMatrix read_probs_csv(std::istream& in, std::size_t n_nodes, std::size_t num_classes,
                          const std::string& source_name) {
  ProbMatrix out(n_nodes, num_classes);
  std::vector<bool> seen(n_nodes, false);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.starts_with("node_id")) continue;
    std::vector<std::string_view> cells;
    std::string_view view = line;
    while (true) {
      auto comma = view.find(',');
      cells.push_back(view.substr(0, comma));
      if (comma == std::string_view::npos) break;
      view.remove_prefix(comma + 1);
    }
    if (cells.size() != num_classes + 1) {
      throw ParseError(source_name, line_no, "expected node_id plus " + std::to_string(num_classes) + " probabilities");
    }
    std::uint64_t id = 0;
    auto [p, ec] = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), id);
    if (ec != std::errc() || p != cells[0].data() + cells[0].size() || id >= n_nodes) {
      throw ParseError(source_name, line_no, "bad node id '" + std::string(cells[0]) + "'");
    }
    if (seen[id]) throw ParseError(source_name, line_no, "duplicate row for node " + std::to_string(id));
    seen[id] = true;
    for (std::size_t c = 0; c < num_classes; ++c) {
      double x = 0.0;
      auto cell = cells[c + 1];
      auto [q, ec2] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
      if (ec2 != std::errc() || q != cell.data() + cell.size()) {
        throw ParseError(source_name, line_no, "malformed probability '" + std::string(cell) + "'");
      }
      out(id, c) = x;
    }
  }
  for (std::size_t v = 0; v < n_nodes; ++v) {
    if (!seen[v]) throw ParseError(source_name, 0, "missing probability row for node " + std::to_string(v));
  }
  try {
    validate_prob_matrix(out);
  } catch (const Error& e) {
    throw ParseError(source_name, 0, e.what());
  }
  return out;
}

}  // namespace colabel

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

#include "colabel/agreement.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "colabel/error.hpp"

namespace colabel {

using nlohmann::ordered_json;

namespace {

std::string id_list(const std::vector<NodeId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < 20; ++i) {
    if (i) out += ", ";
    out += std::to_string(ids[i]);
  }
  if (ids.size() > 20) out += ", ... (" + std::to_string(ids.size()) + " total)";
  return out;
}

const Prediction& prediction_at(const PredictionSet& set, NodeId v) {
  static const Prediction missing{};
  return v < set.labels.size() ? set.labels[v] : missing;
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

}  // namespace

PredictionSet PredictionSet::from_probs(ProbMatrix probs) {
  PredictionSet out;
  out.labels.reserve(probs.rows());
  for (std::size_t r = 0; r < probs.rows(); ++r) out.labels.push_back(Prediction::of(argmax(probs.row(r))));
  out.probs = std::move(probs);
  return out;
}

void PredictionSet::validate() const {
  if (!probs) return;
  if (probs->rows() < labels.size()) throw Error("prediction set has fewer probability rows than labels");
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (labels[v].parsed() && argmax(probs->row(v)) != labels[v].label) {
      throw Error("node " + std::to_string(v) + ": hard label disagrees with its probability argmax");
    }
  }
}

AgreementSplit partition_agreement(const PredictionSet& gnn, const PredictionSet& llm, std::span<const NodeId> selected) {
  std::vector<NodeId> missing_gnn, missing_llm;
  for (NodeId v : selected) {
    if (!prediction_at(gnn, v).parsed()) missing_gnn.push_back(v);
    if (prediction_at(llm, v).kind == Prediction::Kind::missing) missing_llm.push_back(v);
  }
  if (!missing_gnn.empty()) throw Error("missing judge predictions for nodes: " + id_list(missing_gnn));
  if (!missing_llm.empty()) throw Error("missing predictions for nodes: " + id_list(missing_llm));

  std::vector<NodeId> sorted(selected.begin(), selected.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  AgreementSplit out;
  for (NodeId v : sorted) {
    const Prediction& l = llm.labels[v];
    if (!l.parsed()) {
      out.unparsed.push_back(v);
    } else if (l.label == gnn.labels[v].label) {
      out.agreed.push_back(v);
    } else {
      out.disagreed.push_back(v);
    }
  }
  return out;
}

double preference_score(std::span<const double> prob_row, ClassId gnn_label, ClassId llm_label) {
  if (gnn_label >= prob_row.size() || llm_label >= prob_row.size()) throw Error("class index out of range");
  if (gnn_label == llm_label) throw Error("preference score needs distinct judge and predictor labels");
  if (argmax(prob_row) != gnn_label) throw Error("judge label is not the argmax of its probability row");
  return prob_row[gnn_label] - prob_row[llm_label];
}

std::vector<ScoredNode> filter_disagreement(std::span<const NodeId> disagreed, const ProbMatrix& probs,
                                            const PredictionSet& gnn, const PredictionSet& llm, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error("tau must be in [0, 1]");
  std::vector<ScoredNode> kept;
  for (NodeId v : disagreed) {
    if (v >= probs.rows()) throw Error("missing probability row for node " + std::to_string(v));
    const Prediction& g = prediction_at(gnn, v);
    const Prediction& l = prediction_at(llm, v);
    if (!g.parsed() || !l.parsed()) throw Error("node " + std::to_string(v) + " lacks a parsed label");
    double s = preference_score(probs.row(v), g.label, l.label);
    if (s >= tau) kept.push_back({v, g.label, l.label, s});
  }
  std::sort(kept.begin(), kept.end(), [](const ScoredNode& a, const ScoredNode& b) {
    if (a.pref_score != b.pref_score) return a.pref_score > b.pref_score;
    return a.node < b.node;
  });
  return kept;
}

PartitionResult co_label(const PredictionSet& gnn, const PredictionSet& llm, std::span<const NodeId> selected,
                         double tau) {
  if (!gnn.probs) throw Error("judge predictions carry no probabilities");
  AgreementSplit split = partition_agreement(gnn, llm, selected);
  PartitionResult out;
  out.selected.assign(selected.begin(), selected.end());
  out.agreed = std::move(split.agreed);
  out.unparsed = std::move(split.unparsed);
  out.tau = tau;
  for (NodeId v : split.disagreed) {
    ClassId g = gnn.labels[v].label;
    ClassId l = llm.labels[v].label;
    out.disagreed.push_back({v, g, l, preference_score(gnn.probs->row(v), g, l)});
  }
  out.filtered = filter_disagreement(split.disagreed, *gnn.probs, gnn, llm, tau);
  return out;
}

AgreementBound agreement_accuracy_bound(double p_llm, double p_gnn, std::size_t num_classes) {
  if (num_classes < 2) throw Error("agreement bound needs at least 2 classes");
  if (!(p_llm >= 0.0 && p_llm <= 1.0) || !(p_gnn >= 0.0 && p_gnn <= 1.0)) {
    throw Error("accuracies must be in [0, 1]");
  }
  AgreementBound out;
  out.degenerate = p_llm == 0.0 || p_llm == 1.0 || p_gnn == 0.0 || p_gnn == 1.0;
  const double both_right = p_llm * p_gnn;
  const double both_wrong_same = (1.0 - p_llm) * (1.0 - p_gnn) / static_cast<double>(num_classes - 1);
  if (both_right == 0.0) {
    out.value = 0.0;
  } else if (both_wrong_same == 0.0) {
    out.value = 1.0;
  } else {
    out.value = both_right / (both_right + both_wrong_same);
  }
  out.exceeds_max = out.value > std::max(p_llm, p_gnn);
  return out;
}

ErrorCorrelation error_correlation(const PredictionSet& gnn, const PredictionSet& llm, const LabelAssignment& truth,
                                   std::span<const NodeId> nodes) {
  std::size_t n = 0, g_err = 0, l_err = 0, both = 0;
  for (NodeId v : nodes) {
    if (v >= truth.size() || !truth.known(v)) continue;
    const Prediction& g = prediction_at(gnn, v);
    const Prediction& l = prediction_at(llm, v);
    if (!g.parsed() || !l.parsed()) continue;
    bool ge = g.label != truth.at(v);
    bool le = l.label != truth.at(v);
    ++n;
    g_err += ge;
    l_err += le;
    both += ge && le;
  }
  if (n == 0) throw Error("error correlation needs at least one evaluated node");

  ErrorCorrelation out;
  out.evaluated = n;
  const double dn = static_cast<double>(n);
  const double pg = static_cast<double>(g_err) / dn;
  const double pl = static_cast<double>(l_err) / dn;
  const double pgl = static_cast<double>(both) / dn;
  out.gnn_error_rate = pg;
  out.llm_error_rate = pl;
  const double var_g = pg * (1.0 - pg);
  const double var_l = pl * (1.0 - pl);
  if (var_g > 0.0 && var_l > 0.0) out.pearson = (pgl - pg * pl) / std::sqrt(var_g * var_l);
  if (g_err > 0) out.delta_llm_given_gnn = static_cast<double>(both) / static_cast<double>(g_err) - pl;
  if (l_err > 0) out.delta_gnn_given_llm = static_cast<double>(both) / static_cast<double>(l_err) - pg;
  return out;
}

std::string build_report(const PartitionResult& result, const PredictionSet& gnn, const PredictionSet& llm,
                         std::size_t num_classes, const LabelAssignment* truth, std::span<const std::string> warnings) {
  ordered_json j;
  const std::size_t final_size = result.agreed.size() + result.filtered.size();
  j["counts"] = {{"selected", result.selected.size()},
                 {"agreed", result.agreed.size()},
                 {"disagreed", result.disagreed.size()},
                 {"unparsed", result.unparsed.size()},
                 {"filtered_disagreed", result.filtered.size()},
                 {"final_size", final_size}};
  j["tau"] = result.tau;
  j["ad_ratio"] = std::to_string(result.agreed.size()) + "/" + std::to_string(result.disagreed.size());

  auto is_right = [&](NodeId v, ClassId label) { return truth->known(v) && truth->at(v) == label; };

  ordered_json acc;
  if (truth) {
    std::size_t agree_ok = 0, dis_gnn_ok = 0, dis_llm_ok = 0, sel_ok = 0;
    for (NodeId v : result.agreed) agree_ok += is_right(v, gnn.labels[v].label);
    for (const auto& d : result.disagreed) {
      dis_gnn_ok += is_right(d.node, d.gnn);
      dis_llm_ok += is_right(d.node, d.llm);
    }
    for (const auto& d : result.filtered) sel_ok += is_right(d.node, d.gnn);

    std::vector<NodeId> parsed_selected;
    std::size_t gnn_ok = 0, llm_ok = 0;
    for (NodeId v : result.selected) {
      if (!prediction_at(llm, v).parsed()) continue;
      parsed_selected.push_back(v);
      gnn_ok += is_right(v, gnn.labels[v].label);
      llm_ok += is_right(v, llm.labels[v].label);
    }

    acc["agree_acc"] = opt(ratio(agree_ok, result.agreed.size()));
    acc["disagree_acc"] = opt(ratio(dis_gnn_ok, result.disagreed.size()));
    acc["disagree_llm_acc"] = opt(ratio(dis_llm_ok, result.disagreed.size()));
    acc["final_acc"] = opt(ratio(agree_ok + sel_ok, final_size));
    acc["sel_disagree_acc"] = opt(ratio(sel_ok, result.filtered.size()));
    acc["gnn_acc_selected"] = opt(ratio(gnn_ok, parsed_selected.size()));
    acc["llm_acc_selected"] = opt(ratio(llm_ok, parsed_selected.size()));
    j["accuracy"] = acc;

    if (!parsed_selected.empty()) {
      double p_l = static_cast<double>(llm_ok) / static_cast<double>(parsed_selected.size());
      double p_g = static_cast<double>(gnn_ok) / static_cast<double>(parsed_selected.size());
      AgreementBound b = agreement_accuracy_bound(p_l, p_g, num_classes);
      j["agreement_bound"] = {{"p_llm", p_l}, {"p_gnn", p_g}, {"num_classes", num_classes},
                              {"value", b.value}, {"exceeds_max", b.exceeds_max}, {"degenerate", b.degenerate}};
      ErrorCorrelation ec = error_correlation(gnn, llm, *truth, parsed_selected);
      j["error_correlation"] = {{"evaluated", ec.evaluated},
                                {"gnn_error_rate", ec.gnn_error_rate},
                                {"llm_error_rate", ec.llm_error_rate},
                                {"pearson", opt(ec.pearson)},
                                {"delta_llm_given_gnn", opt(ec.delta_llm_given_gnn)},
                                {"delta_gnn_given_llm", opt(ec.delta_gnn_given_llm)}};
    } else {
      j["agreement_bound"] = nullptr;
      j["error_correlation"] = nullptr;
    }
  } else {
    for (const char* key : {"agree_acc", "disagree_acc", "disagree_llm_acc", "final_acc", "sel_disagree_acc",
                            "gnn_acc_selected", "llm_acc_selected"}) {
      acc[key] = nullptr;
    }
    j["accuracy"] = acc;
    j["agreement_bound"] = nullptr;
    j["error_correlation"] = nullptr;
  }
  j["warnings"] = std::vector<std::string>(warnings.begin(), warnings.end());
  return j.dump(2) + "\n";
}

std::string partition_to_json(const PartitionResult& result) {
  auto scored = [](const std::vector<ScoredNode>& nodes) {
    ordered_json arr = ordered_json::array();
    for (const auto& d : nodes) {
      arr.push_back({{"node_id", d.node}, {"gnn", d.gnn}, {"llm", d.llm}, {"pref_score", d.pref_score}});
    }
    return arr;
  };
  ordered_json j;
  j["tau"] = result.tau;
  j["selected"] = result.selected;
  j["agreed"] = result.agreed;
  j["disagreed"] = scored(result.disagreed);
  j["filtered"] = scored(result.filtered);
  j["unparsed"] = result.unparsed;
  return j.dump(2) + "\n";
}

PartitionResult partition_from_json(const std::string& text, const std::string& source_name) {
  try {
    auto j = ordered_json::parse(text);
    auto scored = [](const ordered_json& arr) {
      std::vector<ScoredNode> out;
      for (const auto& e : arr) {
        out.push_back({e.at("node_id").get<NodeId>(), e.at("gnn").get<ClassId>(), e.at("llm").get<ClassId>(),
                       e.at("pref_score").get<double>()});
      }
      return out;
    };
    PartitionResult r;
    r.tau = j.at("tau").get<double>();
    r.selected = j.at("selected").get<std::vector<NodeId>>();
    r.agreed = j.at("agreed").get<std::vector<NodeId>>();
    r.disagreed = scored(j.at("disagreed"));
    r.filtered = scored(j.at("filtered"));
    r.unparsed = j.at("unparsed").get<std::vector<NodeId>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source_name, 0, e.what());
  }
}

}  // namespace colabel

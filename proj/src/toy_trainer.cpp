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

#include "colabel/toy_trainer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "colabel/error.hpp"
#include "colabel/generators.hpp"
#include "colabel/rng.hpp"

namespace colabel {

using nlohmann::json;

namespace {

void logits_softmax(const ToyModel& m, const SparseCounts& x, std::vector<double>& out) {
  const std::size_t classes = m.num_classes;
  out.assign(m.bias.begin(), m.bias.end());
  for (const auto& [t, count] : x) {
    auto w = m.weights.row(t);
    for (std::size_t c = 0; c < classes; ++c) out[c] += count * w[c];
  }
  const double mx = *std::max_element(out.begin(), out.end());
  double sum = 0.0;
  for (double& v : out) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : out) v /= sum;
}

// Accumulate scale * dz into the gradient of every parameter touched by x.
void scatter(const SparseCounts& x, std::span<const double> dz, double scale, ToyGrad& g) {
  for (std::size_t c = 0; c < dz.size(); ++c) g.d_bias[c] += scale * dz[c];
  for (const auto& [t, count] : x) {
    auto row = g.d_weights.row(t);
    for (std::size_t c = 0; c < dz.size(); ++c) row[c] += scale * count * dz[c];
  }
}

CombinedLoss loss_only(const ToyModel& m, const ToyBatch& b, const LossConfig& config) {
  std::vector<double> p;
  std::vector<double> agree(b.agree_x.size());
  for (std::size_t i = 0; i < b.agree_x.size(); ++i) {
    logits_softmax(m, b.agree_x[i], p);
    agree[i] = p[b.agree_y[i]];
  }
  std::vector<PreferenceInstance> prefs(b.pref_x.size());
  for (std::size_t i = 0; i < b.pref_x.size(); ++i) {
    logits_softmax(m, b.pref_x[i], p);
    prefs[i] = {p[b.chosen[i]], p[b.rejected[i]]};
  }
  return combined_loss_terms(agree, prefs, config);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  std::sort(tokens_.begin(), tokens_.end());
  for (std::uint32_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second) throw Error("duplicate vocabulary token '" + tokens_[i] + "'");
  }
}

Vocabulary Vocabulary::build(std::span<const std::string> texts, std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const auto& t : texts)
    for (auto& tok : tokenize(t)) ++counts[std::move(tok)];
  std::vector<std::string> kept;
  for (const auto& [tok, n] : counts)
    if (n >= min_count) kept.push_back(tok);
  return Vocabulary(std::move(kept));
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SparseCounts featurize(std::string_view text, const Vocabulary& vocab) {
  std::map<std::uint32_t, double> acc;
  for (const auto& tok : tokenize(text))
    if (auto idx = vocab.index_of(tok)) acc[*idx] += 1.0;
  return SparseCounts(acc.begin(), acc.end());
}

std::vector<double> to_dense(const SparseCounts& x, std::size_t dims) {
  std::vector<double> out(dims, 0.0);
  for (const auto& [t, c] : x) out.at(t) = c;
  return out;
}

void ToyConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw Error("toy learning rate must be > 0");
  if (epochs == 0) throw Error("toy epochs must be >= 1");
  if (patience == 0) throw Error("toy patience must be >= 1");
  if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) throw Error("toy init_scale must be >= 0");
  if (min_token_count == 0) throw Error("min_token_count must be >= 1");
  loss.validate();
}

ToyModel ToyModel::zeros(Vocabulary vocab, std::size_t num_classes) {
  if (num_classes < 2) throw Error("toy model needs at least 2 classes");
  ToyModel m;
  m.num_classes = num_classes;
  m.weights = Matrix(vocab.size(), num_classes);
  m.bias.assign(num_classes, 0.0);
  m.vocab = std::move(vocab);
  return m;
}

ToyBatch make_batch(std::span<const AgreeExample> agree, std::span<const PrefExample> prefs, const Vocabulary& vocab,
                    std::size_t num_classes) {
  ToyBatch b;
  for (std::size_t i = 0; i < agree.size(); ++i) {
    if (agree[i].label >= num_classes) throw Error("agreement example " + std::to_string(i) + " has label out of range");
    b.agree_x.push_back(featurize(agree[i].text, vocab));
    b.agree_y.push_back(agree[i].label);
  }
  for (std::size_t i = 0; i < prefs.size(); ++i) {
    const auto& p = prefs[i];
    if (p.chosen >= num_classes || p.rejected >= num_classes)
      throw Error("preference example " + std::to_string(i) + " has label out of range");
    if (p.chosen == p.rejected) throw Error("preference example " + std::to_string(i) + " has chosen == rejected");
    b.pref_x.push_back(featurize(p.text, vocab));
    b.chosen.push_back(p.chosen);
    b.rejected.push_back(p.rejected);
  }
  return b;
}

std::vector<double> predict_proba(const ToyModel& model, const SparseCounts& x) {
  std::vector<double> p;
  logits_softmax(model, x, p);
  return p;
}

std::vector<double> predict_proba(const ToyModel& model, std::string_view text) {
  return predict_proba(model, featurize(text, model.vocab));
}

ClassId predict(const ToyModel& model, std::string_view text) {
  auto p = predict_proba(model, text);
  return static_cast<ClassId>(std::max_element(p.begin(), p.end()) - p.begin());
}

double accuracy(const ToyModel& model, std::span<const AgreeExample> examples) {
  if (examples.empty()) throw Error("accuracy over an empty example list");
  std::size_t ok = 0;
  for (const auto& e : examples) ok += predict(model, e.text) == e.label;
  return static_cast<double>(ok) / static_cast<double>(examples.size());
}

ToyGrad combined_loss_and_grad(const ToyModel& model, const ToyBatch& batch, const LossConfig& config) {
  config.validate();
  const std::size_t classes = model.num_classes;
  ToyGrad g;
  g.d_weights = Matrix(model.weights.rows(), classes);
  g.d_bias.assign(classes, 0.0);

  std::vector<double> p;
  std::vector<double> dz(classes);
  std::vector<double> agree(batch.agree_x.size());
  const double eps = config.epsilon_clip;

  const double a_scale = batch.agree_x.empty() ? 0.0 : 1.0 / static_cast<double>(batch.agree_x.size());
  for (std::size_t i = 0; i < batch.agree_x.size(); ++i) {
    logits_softmax(model, batch.agree_x[i], p);
    const ClassId y = batch.agree_y[i];
    agree[i] = p[y];
    if (p[y] < eps) continue;  // clamped: flat in the parameters
    for (std::size_t c = 0; c < classes; ++c) dz[c] = p[c] - (c == y ? 1.0 : 0.0);
    scatter(batch.agree_x[i], dz, a_scale, g);
  }

  std::vector<PreferenceInstance> prefs(batch.pref_x.size());
  const double p_scale = batch.pref_x.empty() ? 0.0 : config.lambda / static_cast<double>(batch.pref_x.size());
  for (std::size_t i = 0; i < batch.pref_x.size(); ++i) {
    logits_softmax(model, batch.pref_x[i], p);
    const ClassId w = batch.chosen[i], l = batch.rejected[i];
    prefs[i] = {p[w], p[l]};
    if (std::isnan(p[w]) || std::isnan(p[l])) continue;
    const double pw = std::clamp(p[w], eps, 1.0 - eps);
    const double pl = std::clamp(p[l], eps, 1.0 - eps);
    auto d = preference_loss_grad(pw, pl);
    if (pw != p[w]) d.d_p_w = 0.0;
    if (pl != p[l]) d.d_p_l = 0.0;
    // dp_j/dz_c = p_j (delta_jc - p_c)
    for (std::size_t c = 0; c < classes; ++c) {
      dz[c] = d.d_p_w * p[w] * ((c == w ? 1.0 : 0.0) - p[c]) + d.d_p_l * p[l] * ((c == l ? 1.0 : 0.0) - p[c]);
    }
    scatter(batch.pref_x[i], dz, p_scale, g);
  }
  // Diverged parameters give NaN probabilities; report that as a NaN loss.
  auto bad = [](double v) { return std::isnan(v); };
  if (std::any_of(agree.begin(), agree.end(), bad) ||
      std::any_of(prefs.begin(), prefs.end(), [&](const auto& q) { return bad(q.p_w) || bad(q.p_l); })) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    g.loss = {nan, nan, nan};
    return g;
  }
  g.loss = combined_loss_terms(agree, prefs, config);
  return g;
}

std::pair<ToyModel, TrainingCurve> train_weakly_supervised(std::span<const AgreeExample> agree,
                                                           std::span<const PrefExample> prefs,
                                                           std::size_t num_classes, const ToyConfig& config,
                                                           std::uint64_t seed,
                                                           std::span<const AgreeExample> validation) {
  config.validate();
  if (agree.empty() && (prefs.empty() || config.loss.lambda == 0.0))
    throw Error("nothing to optimize: empty agreement set and no weighted preference pairs");

  std::vector<std::string> texts;
  for (const auto& e : agree) texts.push_back(e.text);
  for (const auto& e : prefs) texts.push_back(e.text);
  ToyModel model = ToyModel::zeros(Vocabulary::build(texts, config.min_token_count), num_classes);
  model.config = config;
  model.seed = seed;
  if (config.init_scale > 0.0) {
    CounterRng rng(seed, 0x70e);
    for (double& w : model.weights.values()) w = config.init_scale * gen::standard_normal(rng);
  }

  const ToyBatch batch = make_batch(agree, prefs, model.vocab, num_classes);
  TrainingCurve curve;
  ToyModel best = model;
  double best_acc = -1.0;
  std::size_t since_best = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    auto g = combined_loss_and_grad(model, batch, config.loss);
    if (!std::isfinite(g.loss.total)) throw Error("non-finite training loss at epoch " + std::to_string(epoch));
    curve.loss.push_back(g.loss.total);
    curve.instruction.push_back(g.loss.instruction);
    curve.preference.push_back(g.loss.preference);
    if (!validation.empty()) {
      const double acc = accuracy(model, validation);
      curve.val_accuracy.push_back(acc);
      if (acc > best_acc) {
        best_acc = acc;
        best = model;
        since_best = 0;
      } else if (++since_best >= config.patience) {
        break;
      }
    } else {
      curve.val_accuracy.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    auto w = model.weights.values();
    auto dw = g.d_weights.values();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= config.learning_rate * dw[i];
    for (std::size_t c = 0; c < num_classes; ++c) model.bias[c] -= config.learning_rate * g.d_bias[c];
  }
  if (!validation.empty()) model = std::move(best);
  return {std::move(model), std::move(curve)};
}

double grad_check(const ToyModel& model, const ToyBatch& batch, const LossConfig& config, double epsilon,
                  double floor) {
  const auto g = combined_loss_and_grad(model, batch, config);
  ToyModel probe = model;
  double worst = 0.0;
  auto compare = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + epsilon;
    const double up = loss_only(probe, batch, config).total;
    param = saved - epsilon;
    const double down = loss_only(probe, batch, config).total;
    param = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
    worst = std::max(worst, std::abs(analytic - numeric) / scale);
  };
  auto w = probe.weights.values();
  auto dw = g.d_weights.values();
  for (std::size_t i = 0; i < w.size(); ++i) compare(w[i], dw[i]);
  for (std::size_t c = 0; c < probe.bias.size(); ++c) compare(probe.bias[c], g.d_bias[c]);
  return worst;
}

void write_curve_csv(const TrainingCurve& curve, std::ostream& out) {
  out << "epoch,loss,instruction,preference,val_accuracy\n";
  char buf[64];
  auto put = [&](double v) {
    if (std::isnan(v)) return;
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (std::size_t e = 0; e < curve.size(); ++e) {
    out << e << ',';
    put(curve.loss[e]);
    out << ',';
    put(curve.instruction[e]);
    out << ',';
    put(curve.preference[e]);
    out << ',';
    put(curve.val_accuracy[e]);
    out << '\n';
  }
}

std::string toy_to_json(const ToyModel& model) {
  json j;
  j["vocab"] = model.vocab.tokens();
  j["num_classes"] = model.num_classes;
  j["weights"] = std::vector<double>(model.weights.values().begin(), model.weights.values().end());
  j["bias"] = model.bias;
  const auto& c = model.config;
  j["config"] = {{"learning_rate", c.learning_rate}, {"epochs", c.epochs},
                 {"patience", c.patience},           {"init_scale", c.init_scale},
                 {"min_token_count", c.min_token_count}, {"lambda", c.loss.lambda},
                 {"epsilon_clip", c.loss.epsilon_clip}};
  j["seed"] = model.seed;
  return j.dump(2) + "\n";
}

ToyModel toy_from_json(const std::string& text, const std::string& source_name) {
  try {
    json j = json::parse(text);
    ToyModel m = ToyModel::zeros(Vocabulary(j.at("vocab").get<std::vector<std::string>>()),
                                 j.at("num_classes").get<std::size_t>());
    auto w = j.at("weights").get<std::vector<double>>();
    auto b = j.at("bias").get<std::vector<double>>();
    if (w.size() != m.weights.values().size() || b.size() != m.num_classes)
      throw ParseError(source_name, 0, "weight shape mismatch");
    for (double x : w)
      if (!std::isfinite(x)) throw ParseError(source_name, 0, "non-finite weight");
    std::copy(w.begin(), w.end(), m.weights.values().begin());
    m.bias = std::move(b);
    const auto& c = j.at("config");
    m.config.learning_rate = c.at("learning_rate").get<double>();
    m.config.epochs = c.at("epochs").get<std::size_t>();
    m.config.patience = c.at("patience").get<std::size_t>();
    m.config.init_scale = c.at("init_scale").get<double>();
    m.config.min_token_count = c.at("min_token_count").get<std::size_t>();
    m.config.loss.lambda = c.at("lambda").get<double>();
    m.config.loss.epsilon_clip = c.at("epsilon_clip").get<double>();
    m.seed = j.value("seed", std::uint64_t{0});
    return m;
  } catch (const json::exception& e) {
    throw ParseError(source_name, 0, e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(source_name, 0, e.what());
  }
}

SyntheticCorpus synthetic_corpus(std::size_t docs, std::size_t vocab_size, std::size_t num_classes,
                                 std::size_t doc_length, std::uint64_t seed) {
  if (num_classes < 2) throw Error("synthetic corpus needs at least 2 classes");
  if (vocab_size < num_classes) throw Error("synthetic corpus vocab must have at least one token per class");
  if (doc_length == 0) throw Error("synthetic documents need at least one token");
  const std::size_t pool = vocab_size / num_classes;
  const std::size_t shared = vocab_size - pool * num_classes;
  auto token = [](std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "w%03zu", i);
    return std::string(buf);
  };
  SyntheticCorpus out;
  out.num_classes = num_classes;
  out.docs.reserve(docs);
  for (std::size_t d = 0; d < docs; ++d) {
    CounterRng rng(seed, d);
    const auto label = static_cast<ClassId>(uniform_index(rng, num_classes));
    std::string text;
    for (std::size_t i = 0; i < doc_length; ++i) {
      std::size_t t;
      if (shared > 0 && rng.uniform() < 0.2)
        t = pool * num_classes + uniform_index(rng, shared);
      else
        t = label * pool + uniform_index(rng, pool);
      if (i) text.push_back(' ');
      text += token(t);
    }
    out.docs.push_back({std::move(text), label});
  }
  return out;
}

}  // namespace colabel

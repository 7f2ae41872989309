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

#include "colabel/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "colabel/error.hpp"

namespace colabel {

namespace {

void require_unit_interval(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(std::string(what) + " must be a probability in [0, 1]");
}

void require_open_interval(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) throw Error(std::string(what) + " must lie strictly inside (0, 1)");
}

double log_odds(double p) { return std::log(p) - std::log1p(-p); }

// ln(1 + e^x) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double orpo_value(double p_w, double p_l) { return log_odds(p_w) - log_odds(p_l); }

PreferenceGrad orpo_grad(double p_w, double p_l) {
  return {1.0 / (p_w * (1.0 - p_w)), -1.0 / (p_l * (1.0 - p_l))};
}

const PreferenceFunction kOrpo{"orpo", &orpo_value, &orpo_grad};

}  // namespace

void LossConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error("lambda must be >= 0");
  if (!(epsilon_clip > 0.0 && epsilon_clip < 0.5)) throw Error("epsilon_clip must be in (0, 0.5)");
}

const PreferenceFunction& orpo_preference() { return kOrpo; }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double instruction_loss(double p, double epsilon) {
  require_unit_interval(p, "instruction-loss probability");
  return -std::log(std::max(p, epsilon));
}

double odds(double p) {
  require_open_interval(p, "odds probability");
  return p / (1.0 - p);
}

double orpo_preference_function(double p_w, double p_l) {
  require_open_interval(p_w, "preferred probability");
  require_open_interval(p_l, "dispreferred probability");
  return orpo_value(p_w, p_l);
}

double preference_loss(double p_w, double p_l, double epsilon, const PreferenceFunction& g) {
  require_unit_interval(p_w, "preferred probability");
  require_unit_interval(p_l, "dispreferred probability");
  p_w = std::clamp(p_w, epsilon, 1.0 - epsilon);
  p_l = std::clamp(p_l, epsilon, 1.0 - epsilon);
  return softplus(-g.value(p_w, p_l));
}

PreferenceGrad preference_loss_grad(double p_w, double p_l, const PreferenceFunction& g) {
  require_open_interval(p_w, "preferred probability");
  require_open_interval(p_l, "dispreferred probability");
  // L = -ln sigmoid(g)  =>  dL/dg = sigmoid(g) - 1.
  const double dl_dg = sigmoid(g.value(p_w, p_l)) - 1.0;
  const PreferenceGrad dg = g.grad(p_w, p_l);
  return {dl_dg * dg.d_p_w, dl_dg * dg.d_p_l};
}

CombinedLoss combined_loss_terms(std::span<const double> agree_probs, std::span<const PreferenceInstance> prefs,
                                 const LossConfig& config, const PreferenceFunction& g) {
  config.validate();
  CombinedLoss out;
  for (double p : agree_probs) out.instruction += instruction_loss(p, config.epsilon_clip);
  if (!agree_probs.empty()) out.instruction /= static_cast<double>(agree_probs.size());
  for (const auto& inst : prefs) out.preference += preference_loss(inst.p_w, inst.p_l, config.epsilon_clip, g);
  if (!prefs.empty()) out.preference /= static_cast<double>(prefs.size());
  out.total = out.instruction + config.lambda * out.preference;
  return out;
}

double combined_loss(std::span<const double> agree_probs, std::span<const PreferenceInstance> prefs,
                     const LossConfig& config) {
  return combined_loss_terms(agree_probs, prefs, config).total;
}

}  // namespace colabel

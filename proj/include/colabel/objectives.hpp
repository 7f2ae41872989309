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

#include <span>
#include <string_view>

namespace colabel {

inline constexpr double kDefaultProbabilityClip = 1e-7;

struct LossConfig {
  double lambda = 0.1;  // weight of the preference term
  double epsilon_clip = kDefaultProbabilityClip;

  void validate() const;
};

// Probability the model assigns to the preferred (judge) label and to the
// dispreferred (text predictor) label of the same input.
struct PreferenceInstance {
  double p_w = 0.5;
  double p_l = 0.5;
};

struct PreferenceGrad {
  double d_p_w = 0.0;
  double d_p_l = 0.0;
};

// Scores how much p_w is preferred over p_l. Only the odds-ratio form ships;
// other preference objectives plug in through the same two entry points.
struct PreferenceFunction {
  std::string_view name;
  double (*value)(double p_w, double p_l);
  PreferenceGrad (*grad)(double p_w, double p_l);  // partial derivatives of value
};

const PreferenceFunction& orpo_preference();

double sigmoid(double x);

// -ln p with p clamped below at epsilon. p = 1 gives exactly 0.
// Throws if p is outside [0, 1] or NaN.
double instruction_loss(double p, double epsilon = kDefaultProbabilityClip);

// p / (1 - p); p must lie strictly inside (0, 1).
double odds(double p);

// ln odds(p_w) - ln odds(p_l); both strictly inside (0, 1).
double orpo_preference_function(double p_w, double p_l);

// -ln sigmoid(g(p_w, p_l)). Inputs in [0, 1] are clamped to
// [epsilon, 1 - epsilon] first; anything else throws.
double preference_loss(double p_w, double p_l, double epsilon = kDefaultProbabilityClip,
                       const PreferenceFunction& g = orpo_preference());

// Analytic (dL/dp_w, dL/dp_l) of preference_loss for p strictly inside (0, 1).
PreferenceGrad preference_loss_grad(double p_w, double p_l, const PreferenceFunction& g = orpo_preference());

struct CombinedLoss {
  double instruction = 0.0;  // mean over agreement probabilities, 0 if none
  double preference = 0.0;   // mean over preference instances, 0 if none
  double total = 0.0;        // instruction + lambda * preference
};

CombinedLoss combined_loss_terms(std::span<const double> agree_probs, std::span<const PreferenceInstance> prefs,
                                 const LossConfig& config, const PreferenceFunction& g = orpo_preference());

double combined_loss(std::span<const double> agree_probs, std::span<const PreferenceInstance> prefs,
                     const LossConfig& config);

}  // namespace colabel

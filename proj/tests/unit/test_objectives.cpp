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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "colabel/error.hpp"
#include "colabel/objectives.hpp"
#include "colabel/rng.hpp"

using namespace colabel;

// Frozen with mpmath at 30 digits.
constexpr double kLn2 = 0.693147180559945309417232121458;
constexpr double kLn81 = 4.39444915467243876558098094769;
constexpr double kLn82Over81 = 0.0122700925918143477030145468054;
constexpr double kLn2Times1p1 = 0.762461898615939840358955333604;

TEST_CASE("instruction loss") {
  CHECK(instruction_loss(1.0) == 0.0);
  CHECK(instruction_loss(0.5) == doctest::Approx(kLn2).epsilon(1e-15));
  CHECK(instruction_loss(std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(instruction_loss(0.0) == doctest::Approx(-std::log(kDefaultProbabilityClip)));
  CHECK_THROWS_AS(instruction_loss(-0.1), Error);
  CHECK_THROWS_AS(instruction_loss(1.5), Error);
  CHECK_THROWS_AS(instruction_loss(std::nan("")), Error);
}

TEST_CASE("odds") {
  CHECK(odds(0.5) == doctest::Approx(1.0));
  CHECK(odds(0.9) == doctest::Approx(9.0).epsilon(1e-14));
  CHECK(odds(0.1) == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
  CounterRng rng(1, 1);
  for (int i = 0; i < 100; ++i) {
    double p = 0.001 + 0.998 * rng.uniform();
    CHECK(odds(p) * odds(1.0 - p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(odds(p) < odds(p + 1e-4));
  }
  CHECK_THROWS_AS(odds(0.0), Error);
  CHECK_THROWS_AS(odds(1.0), Error);
}

TEST_CASE("odds-ratio preference function") {
  CHECK(orpo_preference_function(0.3, 0.3) == 0.0);
  CHECK(orpo_preference_function(0.9, 0.1) == doctest::Approx(kLn81).epsilon(1e-14));
  CounterRng rng(2, 2);
  for (int i = 0; i < 200; ++i) {
    double a = 0.01 + 0.98 * rng.uniform();
    double b = 0.01 + 0.98 * rng.uniform();
    CHECK(orpo_preference_function(a, b) == -orpo_preference_function(b, a));
  }
  CHECK_THROWS_AS(orpo_preference_function(1.0, 0.5), Error);
  CHECK_THROWS_AS(orpo_preference_function(0.5, 0.0), Error);
}

TEST_CASE("preference loss") {
  CHECK(preference_loss(0.4, 0.4) == doctest::Approx(kLn2).epsilon(1e-15));
  CHECK(preference_loss(0.9, 0.1) == doctest::Approx(kLn82Over81).epsilon(1e-13));
  CHECK(preference_loss(1.0 - 1e-9, 0.3) < 1e-6);
  CHECK(preference_loss(0.6, 0.3) < preference_loss(0.5, 0.3));
  CHECK(preference_loss(0.5, 0.4) > preference_loss(0.5, 0.3));
  CHECK_THROWS_AS(preference_loss(1.2, 0.3), Error);
}

TEST_CASE("clamping: values beyond the clip equal the clipped loss") {
  const double eps = kDefaultProbabilityClip;
  CHECK(preference_loss(1.0, 0.2) == preference_loss(1.0 - eps, 0.2));
  CHECK(preference_loss(0.7, 0.0) == preference_loss(0.7, eps));
  CHECK(preference_loss(1.0 - eps / 10, 0.2) == preference_loss(1.0 - eps, 0.2));
  CHECK(std::isfinite(preference_loss(0.0, 1.0)));
  CHECK(instruction_loss(eps / 100) == instruction_loss(eps));
}

TEST_CASE("preference gradient") {
  auto g = preference_loss_grad(0.5, 0.5);
  CHECK(g.d_p_w == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(g.d_p_l == doctest::Approx(2.0).epsilon(1e-14));

  CounterRng rng(3, 3);
  const double h = 1e-6;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    double pw = 0.01 + 0.98 * rng.uniform();
    double pl = 0.01 + 0.98 * rng.uniform();
    auto a = preference_loss_grad(pw, pl);
    CHECK(a.d_p_w < 0.0);
    CHECK(a.d_p_l > 0.0);
    double fw = (preference_loss(pw + h, pl) - preference_loss(pw - h, pl)) / (2 * h);
    double fl = (preference_loss(pw, pl + h) - preference_loss(pw, pl - h)) / (2 * h);
    worst = std::max(worst, std::abs(a.d_p_w - fw) / std::abs(a.d_p_w));
    worst = std::max(worst, std::abs(a.d_p_l - fl) / std::abs(a.d_p_l));
  }
  CHECK(worst <= 1e-6);
  CHECK_THROWS_AS(preference_loss_grad(0.0, 0.5), Error);
}

TEST_CASE("combined loss") {
  LossConfig cfg;
  std::vector<double> agree{0.5};
  std::vector<PreferenceInstance> prefs{{0.5, 0.5}};
  CHECK(combined_loss(agree, prefs, cfg) == doctest::Approx(kLn2Times1p1).epsilon(1e-14));

  LossConfig no_pref{0.0};
  CHECK(combined_loss(agree, prefs, no_pref) == doctest::Approx(kLn2));
  CHECK(combined_loss({}, {}, cfg) == 0.0);

  std::vector<double> certain{1.0, 1.0};
  CHECK(combined_loss(certain, {}, cfg) == 0.0);

  auto terms = combined_loss_terms(std::vector<double>{0.25, 0.5}, prefs, cfg);
  CHECK(terms.instruction == doctest::Approx((std::log(4.0) + kLn2) / 2));
  CHECK(terms.preference == doctest::Approx(kLn2));

  LossConfig bad{-1.0};
  CHECK_THROWS_AS(combined_loss(agree, prefs, bad), Error);
  LossConfig bad_clip{0.1, 0.7};
  CHECK_THROWS_AS(combined_loss(agree, prefs, bad_clip), Error);
}

TEST_CASE("losses are nonnegative on random inputs") {
  CounterRng rng(4, 4);
  LossConfig cfg;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> agree{rng.uniform(), rng.uniform()};
    std::vector<PreferenceInstance> prefs{{rng.uniform(), rng.uniform()}};
    CHECK(combined_loss(agree, prefs, cfg) >= 0.0);
  }
}

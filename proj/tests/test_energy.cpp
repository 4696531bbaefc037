/*
 * Copyright (c) 2026, The rollfit Authors. All rights reserved.
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
#include <random>
#include <vector>

#include "oracle.hpp"
#include "rollfit/energy.hpp"
#include "rollfit/errors.hpp"

using namespace rollfit;
using rollfit::testing::oracle_fit;
using rollfit::testing::random_instance;
using rollfit::testing::relative_error;

namespace {

std::vector<PixelSample> grid_samples(int w, int h, double a0, double a1,
                                      double a2, double theta) {
  SyntheticRoadSpec spec;
  spec.width = w;
  spec.height = h;
  spec.alpha0 = a0;
  spec.alpha1 = a1;
  spec.alpha2 = a2;
  spec.true_roll = theta;
  return samples_of(generate_synthetic(spec));
}

double sum_sq(const std::vector<PixelSample>& s) {
  double acc = 0.0;
  for (const auto& p : s) acc += p.d * p.d;
  return acc;
}

}  // namespace

TEST_CASE("build_design rows") {
  const std::vector<PixelSample> s{{0, 0, 1}, {0, 1, 1}, {0, 2, 1}};
  const auto m = build_design(s, 0.0);
  REQUIRE(m.rows.size() == 3);
  CHECK(m.rows[0] == std::array<double, 3>{1, 0, 0});
  CHECK(m.rows[1] == std::array<double, 3>{1, 1, 1});
  CHECK(m.rows[2] == std::array<double, 3>{1, 2, 4});

  const std::vector<PixelSample> t{{1, 5, 1}, {2, 5, 1}, {3, 5, 1}};
  const auto q = build_design(t, std::numbers::pi / 2);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(q.rows[i][1] == doctest::Approx(-t[i].u).epsilon(1e-12));
    CHECK(q.rows[i][2] == q.rows[i][1] * q.rows[i][1]);
  }
  CHECK_THROWS_AS(build_design(std::vector<PixelSample>(2), 0.0),
                  InsufficientDataError);
}

TEST_CASE("fit_parabola recovers an exact model") {
  const auto s = grid_samples(10, 10, 2.0, 0.5, 0.01, 0.0);
  const auto fit = fit_parabola(s, 0.0);
  CHECK(fit.alpha[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(fit.alpha[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(fit.alpha[2] == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(fit.e_min < 1e-6);
  CHECK(fit.n_samples == 100);
  CHECK(fit.theta == 0.0);
}

TEST_CASE("fit_parabola rejects degenerate geometry") {
  std::vector<PixelSample> one_row;
  for (int u = 0; u < 20; ++u) one_row.push_back({double(u), 3.0, 1.0 + u});
  CHECK_THROWS_AS(fit_parabola(one_row, 0.0), DegenerateGeometryError);

  std::vector<PixelSample> two_rows;
  for (int u = 0; u < 20; ++u) two_rows.push_back({double(u), double(u % 2), 1.0});
  CHECK_THROWS_AS(fit_parabola(two_rows, 0.0), DegenerateGeometryError);

  CHECK_THROWS_AS(fit_parabola(std::vector<PixelSample>(2), 0.0),
                  InsufficientDataError);
}

TEST_CASE("fit_parabola matches the brute-force normal equations") {
  std::mt19937_64 rng(42);
  const auto inst = random_instance(rng, 200, 200, 150);
  const auto fit = fit_parabola(inst.samples, 0.1);
  const auto ref = oracle_fit(inst.samples, 0.1);
  for (int k = 0; k < 3; ++k) {
    CHECK(relative_error(fit.alpha[k], ref.alpha[k]) < 1e-8);
  }
  CHECK(relative_error(fit.e_min, ref.e_min) < 1e-8);
}

TEST_CASE("e_min examples") {
  const auto exact = grid_samples(80, 60, 5.0, 0.3, 2e-3, 0.05);
  CHECK(e_min(exact, 0.05) <= 1e-9 * sum_sq(exact));
  CHECK(e_min(exact, 0.05) < e_min(exact, 0.0));
  CHECK(e_min(exact, 0.05) < e_min(exact, 0.1));

  std::mt19937_64 rng(3);
  const auto inst = random_instance(rng, 300);
  auto scaled = inst.samples;
  const double c = 3.7;
  for (auto& p : scaled) p.d *= c;
  for (double theta : {-0.4, -0.1, 0.0, 0.2, 0.9}) {
    const double base = e_min(inst.samples, theta);
    CHECK(relative_error(e_min(scaled, theta), c * c * base) < 1e-9);
  }
}

TEST_CASE("grad_e_min examples") {
  const auto exact = grid_samples(80, 60, 5.0, 0.3, 2e-3, 0.05);
  CHECK(std::abs(grad_e_min(exact, 0.05).grad) < 1e-6);
  const double left = grad_e_min(exact, 0.0).grad;
  const double right = grad_e_min(exact, 0.1).grad;
  CHECK(left < 0.0);
  CHECK(right > 0.0);

  std::mt19937_64 rng(8);
  const auto inst = random_instance(rng, 200);
  const double theta = 0.07, h = 1e-6;
  const double fd =
      (e_min(inst.samples, theta + h) - e_min(inst.samples, theta - h)) /
      (2 * h);
  const auto g = grad_e_min(inst.samples, theta);
  CHECK(g.theta == theta);
  CHECK(relative_error(g.grad, fd) < 1e-4);
}

TEST_CASE("fit_with_gradient agrees with the separate entry points") {
  std::mt19937_64 rng(12);
  const auto inst = random_instance(rng, 500);
  const auto both = fit_with_gradient(inst.samples, -0.2);
  CHECK(both.fit.e_min == e_min(inst.samples, -0.2));
  CHECK(both.gradient.grad == grad_e_min(inst.samples, -0.2).grad);
}

TEST_CASE("energy properties over random instances") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> angle(-1.5, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = random_instance(rng, 150);
    const double theta = angle(rng);
    const auto fit = fit_parabola(inst.samples, theta);
    REQUIRE(fit.e_min >= 0.0);

    // Y^T (d - Y alpha) = 0 within 1e-7 ||d||.
    double dnorm = 0.0;
    std::array<double, 3> normal{};
    for (const auto& p : inst.samples) {
      const double y = p.v * std::cos(theta) - p.u * std::sin(theta);
      const double r = p.d - (fit.alpha[0] + fit.alpha[1] * y +
                              fit.alpha[2] * y * y);
      normal[0] += r;
      normal[1] += r * y;
      normal[2] += r * y * y;
      dnorm += p.d * p.d;
    }
    dnorm = std::sqrt(dnorm);
    for (int k = 0; k < 3; ++k) REQUIRE(std::abs(normal[k]) <= 1e-7 * dnorm);
  }
}

TEST_CASE("argmin of a theta grid is invariant to disparity scaling") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const auto inst = random_instance(rng, 400, 320, 240, 0.5);
    auto scaled = inst.samples;
    for (auto& p : scaled) p.d *= 0.37;
    auto argmin = [](const std::vector<PixelSample>& s) {
      int best = 0;
      double best_e = INFINITY;
      for (int k = 0; k <= 300; ++k) {
        const double e = e_min(s, -0.3 + k * 0.002);
        if (e < best_e) best_e = e, best = k;
      }
      return best;
    };
    CHECK(argmin(inst.samples) == argmin(scaled));
  }
}

TEST_CASE("energy evaluation is bit-identical across thread counts") {
  SyntheticRoadSpec spec;
  spec.width = 400;
  spec.height = 300;
  spec.true_roll = 0.02;
  spec.noise_sigma = 0.5;
  const auto s = samples_of(generate_synthetic(spec));
  setenv("ROLLFIT_THREADS", "1", 1);
  const auto one = fit_with_gradient(s, 0.01);
  setenv("ROLLFIT_THREADS", "4", 1);
  const auto four = fit_with_gradient(s, 0.01);
  unsetenv("ROLLFIT_THREADS");
  CHECK(one.fit.e_min == four.fit.e_min);
  CHECK(one.fit.alpha == four.fit.alpha);
  CHECK(one.gradient.grad == four.gradient.grad);
}

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

#pragma once

#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rollfit/disparity_map.hpp"

namespace rollfit {

enum class Method { kGd, kGss, kGrid, kPlane };

enum class Termination {
  kConverged,
  kMaxIters,
  kDegenerateLambda,
  kIntervalCollapsed,
};

std::string to_string(Method method);
std::string to_string(Termination termination);
// Accepts "gd", "gss", "grid", "plane".
Method parse_method(const std::string& name);

// Precision thresholds of the iteration-count comparison: 0.1, 0.01, 0.001
// and 0.0001 degrees.
inline constexpr double kDeltaTheta1e3 = std::numbers::pi / 1.8e3;
inline constexpr double kDeltaTheta1e4 = std::numbers::pi / 1.8e4;
inline constexpr double kDeltaTheta1e5 = std::numbers::pi / 1.8e5;
inline constexpr double kDeltaTheta1e6 = std::numbers::pi / 1.8e6;

struct SolverConfig {
  Method method = Method::kGd;
  double lambda0 = 26.0;
  double delta_theta = kDeltaTheta1e4;
  int max_iters = 100;
  double theta_lo = -std::numbers::pi / 2;
  double theta_hi = std::numbers::pi / 2;
  double theta0 = 0.0;
  double grid_step = 1e-4;

  // Throws InvalidArgument on an unusable configuration.
  void validate() const;
};

struct IterateRecord {
  int k = 0;
  double theta = 0.0;
  double e_min = 0.0;
  std::optional<double> grad;    // gd only
  std::optional<double> lambda;  // gd only: step size leaving this iterate

  bool operator==(const IterateRecord&) const = default;
};

struct SolverReport {
  double theta_hat = 0.0;
  int iterations = 0;
  int energy_evals = 0;
  int gradient_evals = 0;
  std::vector<IterateRecord> trace;
  Termination termination = Termination::kConverged;

  bool operator==(const SolverReport&) const = default;
};

// Gradient descent with the secant-style adaptive learning rate
//
//   theta(k+1)  = theta(k) - lambda(k) g(k)
//   lambda(k+1) = lambda(k) g(k) / (g(k) - g(k+1))
//
// starting from (theta0, lambda0), where g is dE_min/dtheta. Stops once two
// successive iterates differ by less than delta_theta. Iterates are clamped
// to [theta_lo, theta_hi]; iterations counts theta updates. Each gradient
// evaluation also yields E_min, so energy_evals stays 0.
SolverReport solve_gd(std::span<const PixelSample> samples,
                      const SolverConfig& config);

// Golden-section search on E_min over [theta_lo, theta_hi]. One fresh energy
// evaluation per bracket reduction after the first; stops when the bracket
// is narrower than delta_theta and returns its midpoint.
SolverReport solve_gss(std::span<const PixelSample> samples,
                       const SolverConfig& config);

// Exhaustive scan at theta_lo + k * grid_step up to theta_hi; ties go to the
// smaller theta.
SolverReport solve_grid(std::span<const PixelSample> samples,
                        const SolverConfig& config);

// Plane baseline: fits d ~ c0 + c1 u + c2 v and returns atan(-c1 / c2).
double solve_plane(std::span<const PixelSample> samples);

// Dispatches on config.method. The plane baseline is reported as a
// zero-iteration converged solve.
SolverReport solve(std::span<const PixelSample> samples,
                   const SolverConfig& config);

// Golden ratio used by solve_gss.
inline constexpr double kGoldenRatio = 0.6180339887498949;

// Bracket reductions golden-section search needs to shrink an interval of
// the given width below delta_theta.
int gss_iteration_count(double width, double delta_theta);

}  // namespace rollfit

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

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "rollfit/disparity_map.hpp"

namespace rollfit {

// Y(theta): one row (1, y, y^2) per sample, y the rotated row coordinate.
struct DesignMatrix {
  double theta = 0.0;
  std::vector<std::array<double, 3>> rows;
};

DesignMatrix build_design(std::span<const PixelSample> samples, double theta);

// Least-squares parabola d ~ alpha[0] + alpha[1] y + alpha[2] y^2 at a
// fixed theta, and the residual energy it leaves.
struct FitResult {
  std::array<double, 3> alpha{};
  double e_min = 0.0;
  std::size_t n_samples = 0;
  double theta = 0.0;
};

struct GradientEval {
  double grad = 0.0;  // dE_min/dtheta
  double theta = 0.0;
};

// Condition-number ceiling for the normalized 3x3 normal equations.
inline constexpr double kMaxCondition = 1e12;

// Throws InsufficientDataError for fewer than 3 samples and
// DegenerateGeometryError when the samples do not pin down a parabola in y.
FitResult fit_parabola(std::span<const PixelSample> samples, double theta);

double e_min(std::span<const PixelSample> samples, double theta);

// dE_min/dtheta by the envelope contraction -2 r^T (dY/dtheta) alpha, which
// never forms an n x n matrix.
GradientEval grad_e_min(std::span<const PixelSample> samples, double theta);

// Fit and gradient from one set of passes over the samples.
struct FitAndGradient {
  FitResult fit;
  GradientEval gradient;
};

FitAndGradient fit_with_gradient(std::span<const PixelSample> samples,
                                 double theta);

}  // namespace rollfit

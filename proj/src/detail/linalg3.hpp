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

// 3x3 helpers shared by the parabola and plane fits.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "rollfit/energy.hpp"

namespace rollfit::detail {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

inline double norm1(const Mat3& m) {
  double best = 0.0;
  for (int j = 0; j < 3; ++j) {
    best = std::max(best, std::abs(m[0][j]) + std::abs(m[1][j]) +
                              std::abs(m[2][j]));
  }
  return best;
}

inline Vec3 mul(const Mat3& m, const Vec3& x) {
  return {m[0][0] * x[0] + m[0][1] * x[1] + m[0][2] * x[2],
          m[1][0] * x[0] + m[1][1] * x[1] + m[1][2] * x[2],
          m[2][0] * x[0] + m[2][1] * x[1] + m[2][2] * x[2]};
}

// Inverse by cofactors. Calls make_error(reason) and throws the result when
// the matrix is singular or its 1-norm condition number exceeds
// kMaxCondition.
template <typename MakeError>
Mat3 checked_inverse(const Mat3& a, MakeError make_error) {
  Mat3 adj;
  adj[0][0] = a[1][1] * a[2][2] - a[1][2] * a[2][1];
  adj[0][1] = a[0][2] * a[2][1] - a[0][1] * a[2][2];
  adj[0][2] = a[0][1] * a[1][2] - a[0][2] * a[1][1];
  adj[1][0] = a[1][2] * a[2][0] - a[1][0] * a[2][2];
  adj[1][1] = a[0][0] * a[2][2] - a[0][2] * a[2][0];
  adj[1][2] = a[0][2] * a[1][0] - a[0][0] * a[1][2];
  adj[2][0] = a[1][0] * a[2][1] - a[1][1] * a[2][0];
  adj[2][1] = a[0][1] * a[2][0] - a[0][0] * a[2][1];
  adj[2][2] = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  const double det =
      a[0][0] * adj[0][0] + a[0][1] * adj[1][0] + a[0][2] * adj[2][0];
  if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
    throw make_error("singular normal equations");
  }
  Mat3 inv;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) inv[i][j] = adj[i][j] / det;
  }
  const double cond = norm1(a) * norm1(inv);
  if (!(cond <= kMaxCondition)) {
    throw make_error("condition estimate " + std::to_string(cond));
  }
  return inv;
}

// x = inv * b followed by one step of iterative refinement against a.
inline Vec3 solve_refined(const Mat3& a, const Mat3& inv, const Vec3& b) {
  Vec3 x = mul(inv, b);
  const Vec3 ax = mul(a, x);
  const Vec3 delta = mul(inv, {b[0] - ax[0], b[1] - ax[1], b[2] - ax[2]});
  for (int k = 0; k < 3; ++k) x[k] += delta[k];
  return x;
}

}  // namespace rollfit::detail

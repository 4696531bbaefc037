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

#include "rollfit/energy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "rollfit/errors.hpp"
#include "rollfit/parallel.hpp"
#include "detail/linalg3.hpp"

namespace rollfit {

namespace {

constexpr std::size_t kBlock = 8192;

template <std::size_t N>
struct Sums {
  std::array<double, N> s{};

  friend Sums operator+(Sums a, const Sums& b) {
    for (std::size_t k = 0; k < N; ++k) a.s[k] += b.s[k];
    return a;
  }
};

// Shared core of fit_parabola / grad_e_min.
//
// The rotated rows y are standardized to t = (y - mean) / rms before the
// normal equations are formed, so the 3x3 system stays well conditioned
// for any image size. The fitted parabola in t is mapped back to raw y at
// the end; it is the same curve.
FitAndGradient evaluate(std::span<const PixelSample> samples, double theta,
                        bool want_gradient) {
  const std::size_t n = samples.size();
  if (n < 3) {
    throw InsufficientDataError("parabola fit needs at least 3 samples, got " +
                                std::to_string(n));
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  auto row_of = [&](const PixelSample& p) { return p.v * c - p.u * s; };

  const double mean =
      ordered_reduce(
          n, kBlock, Sums<1>{},
          [&](std::size_t b, std::size_t e) {
            Sums<1> acc;
            for (std::size_t i = b; i < e; ++i) acc.s[0] += row_of(samples[i]);
            return acc;
          },
          std::plus<>())
          .s[0] /
      static_cast<double>(n);

  // z = y - mean: sum z, z^2, z^3, z^4, d, z d, z^2 d
  const auto moments = ordered_reduce(
      n, kBlock, Sums<7>{},
      [&](std::size_t b, std::size_t e) {
        Sums<7> acc;
        for (std::size_t i = b; i < e; ++i) {
          const double z = row_of(samples[i]) - mean;
          const double z2 = z * z;
          const double d = samples[i].d;
          acc.s[0] += z;
          acc.s[1] += z2;
          acc.s[2] += z2 * z;
          acc.s[3] += z2 * z2;
          acc.s[4] += d;
          acc.s[5] += z * d;
          acc.s[6] += z2 * d;
        }
        return acc;
      },
      std::plus<>());

  const double nd = static_cast<double>(n);
  const double rms = std::sqrt(moments.s[1] / nd);
  if (!(rms > 0.0)) {
    throw DegenerateGeometryError("rank-deficient parabola fit at theta=" +
                                  std::to_string(theta) +
                                  " (all samples share one rotated row)");
  }
  // Normalized moments of t = z / rms, divided by n.
  const double t1 = moments.s[0] / (nd * rms);
  const double t2 = moments.s[1] / (nd * rms * rms);
  const double t3 = moments.s[2] / (nd * rms * rms * rms);
  const double t4 = moments.s[3] / (nd * rms * rms * rms * rms);
  const detail::Mat3 normal{{{1.0, t1, t2}, {t1, t2, t3}, {t2, t3, t4}}};
  const detail::Vec3 rhs{moments.s[4] / nd, moments.s[5] / (nd * rms),
                 moments.s[6] / (nd * rms * rms)};

  const detail::Mat3 inv = detail::checked_inverse(normal, [&](const std::string& why) {
    return DegenerateGeometryError(
        "rank-deficient parabola fit at theta=" + std::to_string(theta) +
        " (" + why + "); samples need at least 3 distinct rotated rows");
  });
  detail::Vec3 beta = detail::solve_refined(normal, inv, rhs);

  // r = d - f(y);  grad = -2 sum r (df/dy)(dy/dtheta), dy/dtheta = -x.
  const auto residual = ordered_reduce(
      n, kBlock, Sums<2>{},
      [&](std::size_t b, std::size_t e) {
        Sums<2> acc;
        for (std::size_t i = b; i < e; ++i) {
          const auto& p = samples[i];
          const double t = (row_of(p) - mean) / rms;
          const double r = p.d - (beta[0] + t * (beta[1] + t * beta[2]));
          acc.s[0] += r * r;
          if (want_gradient) {
            const double slope = (beta[1] + 2.0 * beta[2] * t) / rms;
            const double x = p.u * c + p.v * s;
            acc.s[1] += r * slope * x;
          }
        }
        return acc;
      },
      std::plus<>());

  FitAndGradient out;
  const double inv_rms = 1.0 / rms;
  const double a2 = beta[2] * inv_rms * inv_rms;
  const double a1 = beta[1] * inv_rms - 2.0 * a2 * mean;
  const double a0 = beta[0] - beta[1] * inv_rms * mean + a2 * mean * mean;
  out.fit.alpha = {a0, a1, a2};
  // Sum of squares, so never negative.
  out.fit.e_min = residual.s[0];
  out.fit.n_samples = n;
  out.fit.theta = theta;
  out.gradient.grad = 2.0 * residual.s[1];
  out.gradient.theta = theta;
  return out;
}

}  // namespace

DesignMatrix build_design(std::span<const PixelSample> samples, double theta) {
  if (samples.size() < 3) {
    throw InsufficientDataError("design matrix needs at least 3 samples, got " +
                                std::to_string(samples.size()));
  }
  DesignMatrix m;
  m.theta = theta;
  m.rows.reserve(samples.size());
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  for (const auto& p : samples) {
    const double y = p.v * c - p.u * s;
    m.rows.push_back({1.0, y, y * y});
  }
  return m;
}

FitResult fit_parabola(std::span<const PixelSample> samples, double theta) {
  return evaluate(samples, theta, false).fit;
}

double e_min(std::span<const PixelSample> samples, double theta) {
  return evaluate(samples, theta, false).fit.e_min;
}

GradientEval grad_e_min(std::span<const PixelSample> samples, double theta) {
  return evaluate(samples, theta, true).gradient;
}

FitAndGradient fit_with_gradient(std::span<const PixelSample> samples,
                                 double theta) {
  return evaluate(samples, theta, true);
}

}  // namespace rollfit

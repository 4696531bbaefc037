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

#include "rollfit/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rollfit/energy.hpp"
#include "rollfit/errors.hpp"
#include "detail/linalg3.hpp"

namespace rollfit {

namespace {

// Below this the adaptive-rate denominator g(k) - g(k+1) is treated as zero.
constexpr double kMinGradientChange = 1e-30;

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::kGd: return "gd";
    case Method::kGss: return "gss";
    case Method::kGrid: return "grid";
    case Method::kPlane: return "plane";
  }
  return "?";
}

std::string to_string(Termination termination) {
  switch (termination) {
    case Termination::kConverged: return "converged";
    case Termination::kMaxIters: return "max_iters";
    case Termination::kDegenerateLambda: return "degenerate_lambda";
    case Termination::kIntervalCollapsed: return "interval_collapsed";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "gd") return Method::kGd;
  if (name == "gss") return Method::kGss;
  if (name == "grid") return Method::kGrid;
  if (name == "plane") return Method::kPlane;
  throw InvalidArgument("unknown method '" + name +
                        "' (expected gd, gss, grid or plane)");
}

void SolverConfig::validate() const {
  if (!std::isfinite(theta_lo) || !std::isfinite(theta_hi) ||
      !(theta_lo < theta_hi)) {
    throw InvalidArgument("search interval needs theta_lo < theta_hi");
  }
  if (!(delta_theta > 0.0)) throw InvalidArgument("delta_theta must be > 0");
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) {
    throw InvalidArgument("lambda0 must be > 0");
  }
  if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  if (!std::isfinite(theta0)) throw InvalidArgument("theta0 must be finite");
  if (method == Method::kGrid && !(grid_step > 0.0)) {
    throw InvalidArgument("grid_step must be > 0");
  }
}

SolverReport solve_gd(std::span<const PixelSample> samples,
                      const SolverConfig& config) {
  config.validate();
  SolverReport report;
  auto clamp = [&](double t) {
    return std::clamp(t, config.theta_lo, config.theta_hi);
  };

  double theta = clamp(config.theta0);
  double lambda = config.lambda0;
  auto eval = fit_with_gradient(samples, theta);
  ++report.gradient_evals;
  double grad = eval.gradient.grad;
  report.trace.push_back({0, theta, eval.fit.e_min, grad, lambda});
  report.termination = Termination::kMaxIters;

  for (int k = 1; k <= config.max_iters; ++k) {
    const double next = clamp(theta - lambda * grad);
    report.iterations = k;
    eval = fit_with_gradient(samples, next);
    ++report.gradient_evals;
    const double next_grad = eval.gradient.grad;
    const double denom = grad - next_grad;
    IterateRecord rec{k, next, eval.fit.e_min, next_grad, std::nullopt};
    const bool lambda_ok = std::abs(denom) >= kMinGradientChange;
    if (lambda_ok) rec.lambda = lambda * grad / denom;
    report.trace.push_back(rec);

    if (std::abs(next - theta) < config.delta_theta) {
      report.termination = Termination::kConverged;
      break;
    }
    if (!lambda_ok) {
      report.termination = Termination::kDegenerateLambda;
      break;
    }
    theta = next;
    grad = next_grad;
    lambda = *rec.lambda;
  }

  if (report.termination == Termination::kDegenerateLambda) {
    const auto best = std::min_element(
        report.trace.begin(), report.trace.end(),
        [](const auto& a, const auto& b) { return a.e_min < b.e_min; });
    report.theta_hat = best->theta;
  } else {
    report.theta_hat = report.trace.back().theta;
  }
  return report;
}

int gss_iteration_count(double width, double delta_theta) {
  int k = 0;
  while (!(width < delta_theta)) {
    width *= kGoldenRatio;
    ++k;
  }
  return k;
}

SolverReport solve_gss(std::span<const PixelSample> samples,
                       const SolverConfig& config) {
  config.validate();
  SolverReport report;
  double lo = config.theta_lo;
  double hi = config.theta_hi;
  if (hi - lo < config.delta_theta) {
    report.theta_hat = 0.5 * (lo + hi);
    report.termination = Termination::kIntervalCollapsed;
    return report;
  }

  double left = hi - kGoldenRatio * (hi - lo);
  double right = lo + kGoldenRatio * (hi - lo);
  double e_left = e_min(samples, left);
  double e_right = e_min(samples, right);
  report.energy_evals = 2;
  report.termination = Termination::kMaxIters;

  for (int k = 1; k <= config.max_iters; ++k) {
    // Keep the sub-interval around the lower of the two interior values;
    // the surviving interior point carries its energy forward.
    const bool keep_left = e_left <= e_right;
    if (keep_left) {
      hi = right;
      right = left;
      e_right = e_left;
    } else {
      lo = left;
      left = right;
      e_left = e_right;
    }
    report.iterations = k;
    report.trace.push_back({k, keep_left ? right : left,
                            keep_left ? e_right : e_left, std::nullopt,
                            std::nullopt});
    if (hi - lo < config.delta_theta) {
      report.termination = Termination::kConverged;
      break;
    }
    if (k == config.max_iters) break;
    if (keep_left) {
      left = hi - kGoldenRatio * (hi - lo);
      e_left = e_min(samples, left);
    } else {
      right = lo + kGoldenRatio * (hi - lo);
      e_right = e_min(samples, right);
    }
    ++report.energy_evals;
  }
  report.theta_hat = 0.5 * (lo + hi);
  return report;
}

SolverReport solve_grid(std::span<const PixelSample> samples,
                        const SolverConfig& config) {
  config.validate();
  SolverReport report;
  const double span = config.theta_hi - config.theta_lo;
  // Relative slack so an endpoint that is a whole number of steps away is
  // not lost to rounding.
  const auto last = static_cast<long long>(
      std::floor(span / config.grid_step * (1.0 + 1e-12)));
  double best_theta = config.theta_lo;
  double best_energy = std::numeric_limits<double>::infinity();
  for (long long k = 0; k <= last; ++k) {
    const double theta =
        std::min(config.theta_lo + static_cast<double>(k) * config.grid_step,
                 config.theta_hi);
    const double energy = e_min(samples, theta);
    ++report.energy_evals;
    if (energy < best_energy) {
      best_energy = energy;
      best_theta = theta;
    }
  }
  report.theta_hat = best_theta;
  report.iterations = report.energy_evals;
  report.trace.push_back({0, best_theta, best_energy, std::nullopt,
                          std::nullopt});
  report.termination = Termination::kConverged;
  return report;
}

double solve_plane(std::span<const PixelSample> samples) {
  const std::size_t n = samples.size();
  if (n < 3) {
    throw InsufficientDataError("plane fit needs at least 3 samples, got " +
                                std::to_string(n));
  }
  const double nd = static_cast<double>(n);
  double mu = 0.0, mv = 0.0;
  for (const auto& p : samples) {
    mu += p.u;
    mv += p.v;
  }
  mu /= nd;
  mv /= nd;
  double suu = 0.0, svv = 0.0;
  for (const auto& p : samples) {
    suu += (p.u - mu) * (p.u - mu);
    svv += (p.v - mv) * (p.v - mv);
  }
  const double su = std::sqrt(suu / nd);
  const double sv = std::sqrt(svv / nd);
  if (!(su > 0.0) || !(sv > 0.0)) {
    throw DegenerateGeometryError(
        "plane fit needs at least 2 distinct columns and 2 distinct rows");
  }
  // Standardized coordinates p = (u - mu)/su, q = (v - mv)/sv.
  detail::Mat3 a{};
  detail::Vec3 b{};
  for (const auto& s : samples) {
    const double p = (s.u - mu) / su;
    const double q = (s.v - mv) / sv;
    const double row[3] = {1.0, p, q};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a[i][j] += row[i] * row[j];
      b[i] += row[i] * s.d;
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) a[i][j] /= nd;
    b[i] /= nd;
  }
  const auto inv = detail::checked_inverse(a, [](const std::string& why) {
    return DegenerateGeometryError("rank-deficient plane fit (" + why + ")");
  });
  const auto coef = detail::solve_refined(a, inv, b);
  const double c1 = coef[1] / su;
  const double c2 = coef[2] / sv;
  if (std::abs(c2) < 1e-12) {
    throw VerticalGradientError(
        "plane fit has no vertical disparity gradient (|c2| < 1e-12); roll "
        "is undefined");
  }
  return std::atan(-c1 / c2);
}

SolverReport solve(std::span<const PixelSample> samples,
                   const SolverConfig& config) {
  switch (config.method) {
    case Method::kGd: return solve_gd(samples, config);
    case Method::kGss: return solve_gss(samples, config);
    case Method::kGrid: return solve_grid(samples, config);
    case Method::kPlane: {
      SolverReport report;
      report.theta_hat = solve_plane(samples);
      report.termination = Termination::kConverged;
      return report;
    }
  }
  throw InvalidArgument("unknown method");
}

}  // namespace rollfit

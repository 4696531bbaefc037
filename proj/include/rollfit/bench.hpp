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

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rollfit/disparity_map.hpp"
#include "rollfit/optimizers.hpp"

namespace rollfit {

enum class Protocol { kItersVsDelta, kLambdaSweep, kAccuracyVsDelta };

Protocol parse_protocol(const std::string& name);
std::string to_string(Protocol protocol);

inline constexpr std::string_view kBenchHeader =
    "method,delta_theta,lambda0,iterations,energy_evals,gradient_evals,"
    "theta_hat,theta_true,abs_error,wall_time";

// One solve of one dataset item. A failed solve keeps method/delta/lambda0
// and carries the error text; the numeric columns are then meaningless.
struct BenchRow {
  std::string method;
  double delta_theta = 0.0;
  double lambda0 = 0.0;
  int iterations = 0;
  int energy_evals = 0;
  int gradient_evals = 0;
  double theta_hat = 0.0;
  std::optional<double> theta_true;
  std::optional<double> abs_error;
  double wall_time = 0.0;
  Termination termination = Termination::kConverged;
  std::optional<std::string> error;
};

struct BenchReport {
  std::vector<BenchRow> rows;

  std::size_t succeeded() const;
};

// |a - b| after wrapping the difference into (-pi/2, pi/2]; roll angles
// that differ by pi describe the same road.
double angle_error(double estimate, double truth);

// CSV with kBenchHeader. Failed rows print "ERR" as theta_hat and leave the
// numeric columns empty. With include_wall_time=false the last column is
// left empty, which makes the output reproducible.
void write_bench_csv(const BenchReport& report, std::ostream& out,
                     bool include_wall_time = true);

struct BenchItem {
  std::string name;
  std::vector<PixelSample> samples;
  std::optional<double> theta_true;
};

// frames x rolls synthetic maps. Frame f redraws the road coefficients
// around the base spec (seeded by base.seed + f) and uses seed base.seed + f
// for the noise, so frames are distinct even without noise.
std::vector<BenchItem> synthetic_items(const SyntheticRoadSpec& base,
                                       int frames,
                                       const std::vector<double>& rolls);

// Every .pgm / .csv map in dir, sorted by file name. Ground truth comes from
// an optional "truth.csv" with header "file,theta".
std::vector<BenchItem> dataset_items(const std::filesystem::path& dir,
                                     const LoadOptions& options = {});

struct BenchSettings {
  std::vector<Method> methods{Method::kGss, Method::kGd};
  std::vector<double> deltas{kDeltaTheta1e3, kDeltaTheta1e4, kDeltaTheta1e5,
                             kDeltaTheta1e6};
  // Initial GD learning rate for the iteration and accuracy protocols.
  double lambda0 = 26.0;
  // Candidates for lambda_sweep.
  std::vector<double> lambdas = default_lambda_grid();
  int max_iters = 100;
  // A GD run whose estimate is farther than this from the reference angle
  // has settled in the wrong basin; tuning rejects such a lambda0.
  double basin_tolerance = 0.01;

  // 10^-12 .. 10^2, four points per decade.
  static std::vector<double> default_lambda_grid();
};

// Rows in configuration order: method, delta_theta, lambda0, item.
BenchReport run_iters_vs_delta(const std::vector<BenchItem>& items,
                               const BenchSettings& settings);
// GD only: every lambda in settings.lambdas at every delta.
BenchReport run_lambda_sweep(const std::vector<BenchItem>& items,
                             const BenchSettings& settings);
// Requires ground truth on every item.
BenchReport run_accuracy_vs_delta(const std::vector<BenchItem>& items,
                                  const BenchSettings& settings);
BenchReport run_protocol(Protocol protocol, const std::vector<BenchItem>& items,
                         const BenchSettings& settings);

// Mean over items of one (method, delta_theta, lambda0) cell.
struct CellSummary {
  std::string method;
  double delta_theta = 0.0;
  double lambda0 = 0.0;
  std::size_t items = 0;
  std::size_t failures = 0;
  double mean_iterations = 0.0;
  double mean_evals = 0.0;  // energy + gradient evaluations
  std::optional<double> mean_abs_error;
};

std::vector<CellSummary> summarize(const BenchReport& report);

// Picks the lambda0 with the fewest total GD iterations across the sweep.
// A candidate is disqualified when any of its runs failed, did not
// converge, or ended farther than basin_tolerance from the reference angle
// (ground truth, or a fine golden-section estimate when the item has none).
// Ties go to the smaller lambda0. Throws Error if no candidate qualifies.
double tune_lambda0(const std::vector<BenchItem>& items,
                    const BenchSettings& settings);

}  // namespace rollfit

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

#include "rollfit/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <tuple>

#include "rollfit/errors.hpp"

namespace rollfit {

namespace {

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

BenchRow run_one(const BenchItem& item, const SolverConfig& config) {
  BenchRow row;
  row.method = to_string(config.method);
  row.delta_theta = config.delta_theta;
  row.lambda0 = config.lambda0;
  row.theta_true = item.theta_true;
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto report = solve(item.samples, config);
    row.iterations = report.iterations;
    row.energy_evals = report.energy_evals;
    row.gradient_evals = report.gradient_evals;
    row.theta_hat = report.theta_hat;
    row.termination = report.termination;
    if (item.theta_true) {
      row.abs_error = angle_error(report.theta_hat, *item.theta_true);
    }
  } catch (const Error& e) {
    row.error = item.name + ": " + e.what();
  }
  row.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return row;
}

SolverConfig base_config(const BenchSettings& settings, Method method,
                         double delta, double lambda0) {
  SolverConfig config;
  config.method = method;
  config.delta_theta = delta;
  config.lambda0 = lambda0;
  config.max_iters = settings.max_iters;
  return config;
}

}  // namespace

Protocol parse_protocol(const std::string& name) {
  if (name == "iters_vs_delta") return Protocol::kItersVsDelta;
  if (name == "lambda_sweep") return Protocol::kLambdaSweep;
  if (name == "accuracy_vs_delta") return Protocol::kAccuracyVsDelta;
  throw InvalidArgument("unknown protocol '" + name +
                        "' (expected iters_vs_delta, lambda_sweep or "
                        "accuracy_vs_delta)");
}

std::string to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::kItersVsDelta: return "iters_vs_delta";
    case Protocol::kLambdaSweep: return "lambda_sweep";
    case Protocol::kAccuracyVsDelta: return "accuracy_vs_delta";
  }
  return "?";
}

std::size_t BenchReport::succeeded() const {
  return static_cast<std::size_t>(std::count_if(
      rows.begin(), rows.end(), [](const auto& r) { return !r.error; }));
}

double angle_error(double estimate, double truth) {
  constexpr double kPi = std::numbers::pi;
  double diff = std::remainder(estimate - truth, kPi);  // [-pi/2, pi/2]
  if (diff <= -kPi / 2) diff += kPi;
  return std::abs(diff);
}

void write_bench_csv(const BenchReport& report, std::ostream& out,
                     bool include_wall_time) {
  out << kBenchHeader << '\n';
  for (const auto& r : report.rows) {
    out << r.method << ',' << format_double(r.delta_theta) << ','
        << format_double(r.lambda0) << ',';
    if (r.error) {
      out << ",,,ERR,";
      if (r.theta_true) out << format_double(*r.theta_true);
      out << ",,\n";
      continue;
    }
    out << r.iterations << ',' << r.energy_evals << ',' << r.gradient_evals
        << ',' << format_double(r.theta_hat) << ',';
    if (r.theta_true) out << format_double(*r.theta_true);
    out << ',';
    if (r.abs_error) out << format_double(*r.abs_error);
    out << ',';
    if (include_wall_time) out << format_double(r.wall_time);
    out << '\n';
  }
}

std::vector<double> BenchSettings::default_lambda_grid() {
  std::vector<double> grid;
  for (int e = -48; e <= 8; ++e) grid.push_back(std::pow(10.0, e / 4.0));
  return grid;
}

std::vector<BenchItem> synthetic_items(const SyntheticRoadSpec& base,
                                       int frames,
                                       const std::vector<double>& rolls) {
  if (frames < 1) throw InvalidArgument("need at least one frame");
  std::vector<BenchItem> items;
  for (int f = 0; f < frames; ++f) {
    SyntheticRoadSpec spec = base;
    spec.seed = base.seed + static_cast<std::uint64_t>(f);
    if (f > 0) {
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> jitter(-1.0, 1.0);
      spec.alpha0 = base.alpha0 * (1.0 + 0.5 * jitter(rng));
      spec.alpha1 = base.alpha1 * (1.0 + 0.25 * jitter(rng));
      spec.alpha2 = base.alpha2 * (1.0 + 0.5 * jitter(rng));
    }
    for (double roll : rolls) {
      spec.true_roll = roll;
      items.push_back({"frame" + std::to_string(f) + "@" + format_double(roll),
                       samples_of(generate_synthetic(spec)), roll});
    }
  }
  return items;
}

std::vector<BenchItem> dataset_items(const std::filesystem::path& dir,
                                     const LoadOptions& options) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw IoError("dataset directory '" + dir.string() + "' does not exist");
  }
  std::map<std::string, double> truth;
  const auto truth_path = dir / "truth.csv";
  if (fs::exists(truth_path)) {
    std::ifstream in(truth_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line_no == 1) {
        if (line != "file,theta") {
          throw ParseError("'" + truth_path.string() +
                           "': expected header 'file,theta' on line 1");
        }
        continue;
      }
      if (line.empty()) continue;
      const auto comma = line.rfind(',');
      double theta = 0.0;
      const char* first = line.data() + comma + 1;
      const char* last = line.data() + line.size();
      auto [ptr, ec] = comma == std::string::npos
                           ? std::from_chars_result{first, std::errc::invalid_argument}
                           : std::from_chars(first, last, theta);
      if (ec != std::errc() || ptr != last) {
        throw ParseError("'" + truth_path.string() + "': bad row on line " +
                         std::to_string(line_no));
      }
      truth[line.substr(0, comma)] = theta;
    }
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".pgm" || ext == ".csv") &&
        entry.path().filename() != "truth.csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw IoError("no .pgm or .csv maps in '" + dir.string() + "'");
  }
  std::vector<BenchItem> items;
  for (const auto& path : files) {
    const auto name = path.filename().string();
    BenchItem item{name,
                   samples_of(load_disparity(path, format_from_path(path),
                                             options)),
                   std::nullopt};
    if (auto it = truth.find(name); it != truth.end()) item.theta_true = it->second;
    items.push_back(std::move(item));
  }
  return items;
}

BenchReport run_iters_vs_delta(const std::vector<BenchItem>& items,
                               const BenchSettings& settings) {
  BenchReport report;
  for (Method method : settings.methods) {
    for (double delta : settings.deltas) {
      const auto config =
          base_config(settings, method, delta, settings.lambda0);
      for (const auto& item : items) report.rows.push_back(run_one(item, config));
    }
  }
  return report;
}

BenchReport run_lambda_sweep(const std::vector<BenchItem>& items,
                             const BenchSettings& settings) {
  BenchReport report;
  for (double delta : settings.deltas) {
    for (double lambda0 : settings.lambdas) {
      const auto config = base_config(settings, Method::kGd, delta, lambda0);
      for (const auto& item : items) report.rows.push_back(run_one(item, config));
    }
  }
  return report;
}

BenchReport run_accuracy_vs_delta(const std::vector<BenchItem>& items,
                                  const BenchSettings& settings) {
  for (const auto& item : items) {
    if (!item.theta_true) {
      throw InvalidArgument("accuracy_vs_delta needs ground truth for '" +
                            item.name + "'");
    }
  }
  return run_iters_vs_delta(items, settings);
}

BenchReport run_protocol(Protocol protocol, const std::vector<BenchItem>& items,
                         const BenchSettings& settings) {
  switch (protocol) {
    case Protocol::kItersVsDelta: return run_iters_vs_delta(items, settings);
    case Protocol::kLambdaSweep: return run_lambda_sweep(items, settings);
    case Protocol::kAccuracyVsDelta:
      return run_accuracy_vs_delta(items, settings);
  }
  throw InvalidArgument("unknown protocol");
}

std::vector<CellSummary> summarize(const BenchReport& report) {
  std::vector<CellSummary> cells;
  for (const auto& r : report.rows) {
    auto it = std::find_if(cells.begin(), cells.end(), [&](const auto& c) {
      return c.method == r.method && c.delta_theta == r.delta_theta &&
             c.lambda0 == r.lambda0;
    });
    if (it == cells.end()) {
      CellSummary cell;
      cell.method = r.method;
      cell.delta_theta = r.delta_theta;
      cell.lambda0 = r.lambda0;
      cells.push_back(cell);
      it = std::prev(cells.end());
    }
    ++it->items;
    if (r.error) {
      ++it->failures;
      continue;
    }
    it->mean_iterations += r.iterations;
    it->mean_evals += r.energy_evals + r.gradient_evals;
    if (r.abs_error) it->mean_abs_error = it->mean_abs_error.value_or(0.0) + *r.abs_error;
  }
  for (auto& c : cells) {
    const auto ok = static_cast<double>(c.items - c.failures);
    if (ok == 0.0) continue;
    c.mean_iterations /= ok;
    c.mean_evals /= ok;
    if (c.mean_abs_error) *c.mean_abs_error /= ok;
  }
  return cells;
}

double tune_lambda0(const std::vector<BenchItem>& items,
                    const BenchSettings& settings) {
  if (items.empty()) throw InvalidArgument("no items to tune on");
  std::vector<double> reference;
  for (const auto& item : items) {
    if (item.theta_true) {
      reference.push_back(*item.theta_true);
    } else {
      SolverConfig fine;
      fine.method = Method::kGss;
      fine.delta_theta = kDeltaTheta1e6;
      reference.push_back(solve_gss(item.samples, fine).theta_hat);
    }
  }
  double best_lambda = 0.0;
  long best_total = std::numeric_limits<long>::max();
  for (double lambda0 : settings.lambdas) {
    long total = 0;
    bool ok = true;
    for (double delta : settings.deltas) {
      const auto config = base_config(settings, Method::kGd, delta, lambda0);
      for (std::size_t i = 0; i < items.size() && ok; ++i) {
        const auto row = run_one(items[i], config);
        ok = !row.error && row.termination == Termination::kConverged &&
             angle_error(row.theta_hat, reference[i]) <= settings.basin_tolerance;
        total += row.iterations;
      }
      if (!ok) break;
    }
    if (ok && total < best_total) {
      best_total = total;
      best_lambda = lambda0;
    }
  }
  if (best_total == std::numeric_limits<long>::max()) {
    throw Error("no lambda0 candidate converged to the reference angle");
  }
  return best_lambda;
}

}  // namespace rollfit

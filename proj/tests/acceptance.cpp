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


// Acceptance suite: one PASS/FAIL line per criterion, with wall-clock budget.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracle.hpp"
#include "rollfit/bench.hpp"
#include "rollfit/disparity_map.hpp"
#include "rollfit/energy.hpp"
#include "rollfit/optimizers.hpp"
#include "rollfit/rotation.hpp"

using namespace rollfit;
using rollfit::testing::literal_gradient;
using rollfit::testing::oracle_fit;
using rollfit::testing::random_instance;
using rollfit::testing::relative_error;

namespace {

constexpr double kPi = std::numbers::pi;
const std::array<double, 4> kDeltas{kDeltaTheta1e3, kDeltaTheta1e4,
                                    kDeltaTheta1e5, kDeltaTheta1e6};

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail.clear();
    if (!detail.empty()) detail += "; ";
    detail += why;
    pass = false;
  }
  void note(const std::string& what) {
    if (!pass) return;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::vector<PixelSample> synth(double roll, double sigma,
                               std::uint64_t seed = 1) {
  SyntheticRoadSpec spec;
  spec.true_roll = roll;
  spec.noise_sigma = sigma;
  spec.seed = seed;
  return samples_of(generate_synthetic(spec));
}

BenchSettings tuning_settings(std::vector<double> deltas) {
  BenchSettings s;
  s.methods = {Method::kGd};
  s.deltas = std::move(deltas);
  return s;
}

// Whole-interval scan, then two refinements down to a 1e-6 step.
double grid_oracle(const std::vector<PixelSample>& samples) {
  SolverConfig c;
  c.method = Method::kGrid;
  c.grid_step = 1e-2;
  double best = solve_grid(samples, c).theta_hat;
  for (double step : {1e-4, 1e-6}) {
    c.theta_lo = std::max(best - 150 * step, -kPi / 2);
    c.theta_hi = std::min(best + 150 * step, kPi / 2);
    c.grid_step = step;
    best = solve_grid(samples, c).theta_hat;
  }
  return best;
}

// Shared by criteria 2 and 7.
struct TableOneRun {
  double lambda0 = 0.0;
  BenchReport report;
};

const TableOneRun& table_one_run() {
  static const TableOneRun run = [] {
    const std::vector<BenchItem> items{{"road", synth(0.03, 0.0), 0.03}};
    TableOneRun r;
    r.lambda0 = tune_lambda0(
        items, tuning_settings({kDeltas.begin(), kDeltas.end()}));
    BenchSettings s;
    s.lambda0 = r.lambda0;
    r.report = run_iters_vs_delta(items, s);
    return r;
  }();
  return run;
}

const BenchRow* find_row(const BenchReport& report, const std::string& method,
                         double delta) {
  for (const auto& row : report.rows) {
    if (row.method == method && row.delta_theta == delta) return &row;
  }
  return nullptr;
}

Outcome gss_counts() {
  Outcome out;
  const std::array<int, 4> want{16, 21, 26, 30};
  const auto samples = synth(0.03, 0.0);
  for (std::size_t i = 0; i < kDeltas.size(); ++i) {
    SolverConfig c;
    c.method = Method::kGss;
    c.delta_theta = kDeltas[i];
    const auto r = solve_gss(samples, c);
    const int law = static_cast<int>(
        std::ceil(std::log(kDeltas[i] / kPi) / std::log(0.618)));
    if (r.iterations != want[i] || law != want[i] ||
        gss_iteration_count(kPi, kDeltas[i]) != want[i]) {
      out.fail("delta " + fmt(kDeltas[i]) + ": got " +
               std::to_string(r.iterations) + ", want " +
               std::to_string(want[i]));
    }
  }
  out.note("counts 16,21,26,30");
  return out;
}

Outcome gd_counts() {
  Outcome out;
  const auto& run = table_one_run();
  std::string counts;
  for (double delta : kDeltas) {
    const auto* row = find_row(run.report, "gd", delta);
    if (row == nullptr || row->error) {
      out.fail("gd failed at delta " + fmt(delta));
      continue;
    }
    counts += (counts.empty() ? "" : ",") + std::to_string(row->iterations);
    if (row->termination != Termination::kConverged || row->iterations > 10) {
      out.fail("delta " + fmt(delta) + ": " +
               std::to_string(row->iterations) + " iterations, " +
               to_string(row->termination));
    }
  }
  out.note("lambda0 " + fmt(run.lambda0) + ", iterations " + counts);
  return out;
}

Outcome rotate_and_recover() {
  Outcome out;
  const std::vector<double> rolls{-0.1, -0.05, -0.02, 0.02, 0.05, 0.1};
  const double delta = kDeltaTheta1e5;
  double worst_clean = 0.0, worst_noisy = 0.0;
  for (double sigma : {0.0, 0.5}) {
    std::vector<BenchItem> items;
    for (double roll : rolls) {
      items.push_back({fmt(roll), synth(roll, sigma, 11), roll});
    }
    SolverConfig c;
    c.delta_theta = delta;
    c.lambda0 = tune_lambda0(items, tuning_settings({delta}));
    const double tol = sigma == 0.0 ? delta : std::max(delta, 2e-6);
    for (const auto& item : items) {
      const double ref =
          sigma == 0.0 ? *item.theta_true : grid_oracle(item.samples);
      for (Method m : {Method::kGd, Method::kGss}) {
        c.method = m;
        const auto r = solve(item.samples, c);
        const double err = std::abs(r.theta_hat - ref);
        (sigma == 0.0 ? worst_clean : worst_noisy) =
            std::max(sigma == 0.0 ? worst_clean : worst_noisy, err);
        if (!(err < tol) || r.termination != Termination::kConverged) {
          out.fail(to_string(m) + " roll " + item.name + " sigma " +
                   fmt(sigma) + ": error " + fmt(err));
        }
      }
    }
  }
  out.note("worst error vs truth " + fmt(worst_clean) + ", vs grid oracle " +
           fmt(worst_noisy));
  return out;
}

Outcome gradient_check() {
  Outcome out;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> angle(-1.2, 1.2);
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = random_instance(rng, 300);
    const double theta = angle(rng);
    const double g = grad_e_min(inst.samples, theta).grad;
    const double fd = (e_min(inst.samples, theta + h) -
                       e_min(inst.samples, theta - h)) /
                      (2.0 * h);
    const double abs_err = std::abs(g - fd);
    const double rel = abs_err / std::max(std::abs(fd), 1e-300);
    if (!(rel <= 1e-4 || abs_err <= 1e-8)) {
      out.fail("trial " + std::to_string(trial) + ": relative error " +
               fmt(rel));
    }
    worst = std::max(worst, std::min(rel, abs_err));
  }
  out.note("100 pairs, worst " + fmt(worst));
  return out;
}

Outcome fit_oracle() {
  Outcome out;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> angle(-1.0, 1.0);
  double worst_fit = 0.0, worst_grad = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_instance(rng, 200);
    const double theta = angle(rng);
    const auto fit = fit_parabola(inst.samples, theta);
    const auto ref = oracle_fit(inst.samples, theta);
    double err = relative_error(fit.e_min, ref.e_min);
    for (int k = 0; k < 3; ++k) {
      err = std::max(err, relative_error(fit.alpha[k], ref.alpha[k]));
    }
    worst_fit = std::max(worst_fit, err);
    if (!(err <= 1e-8)) {
      out.fail("fit trial " + std::to_string(trial) + ": " + fmt(err));
    }
  }
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_instance(rng, 10 + 2 * trial);
    const double theta = angle(rng);
    const double err = relative_error(grad_e_min(inst.samples, theta).grad,
                                      literal_gradient(inst.samples, theta));
    worst_grad = std::max(worst_grad, err);
    if (!(err <= 1e-8)) {
      out.fail("gradient trial " + std::to_string(trial) + ": " + fmt(err));
    }
  }
  out.note("worst fit " + fmt(worst_fit) + ", worst contraction " +
           fmt(worst_grad));
  return out;
}

Outcome accuracy_shape() {
  Outcome out;
  SyntheticRoadSpec base;
  const auto items =
      synthetic_items(base, 10, {-0.1, -0.05, -0.02, 0.02, 0.05, 0.1});
  const std::vector<BenchItem> probe(items.begin(), items.begin() + 6);
  BenchSettings s;
  s.lambda0 = tune_lambda0(probe, tuning_settings({kDeltaTheta1e5}));
  const auto summary = summarize(run_accuracy_vs_delta(items, s));
  auto mean_error = [&](const std::string& method, double delta) {
    for (const auto& cell : summary) {
      if (cell.method == method && cell.delta_theta == delta &&
          cell.failures == 0 && cell.mean_abs_error) {
        return *cell.mean_abs_error;
      }
    }
    return std::numeric_limits<double>::infinity();
  };
  for (double delta : {kDeltaTheta1e5, kDeltaTheta1e6}) {
    const double gd = mean_error("gd", delta);
    const double gss = mean_error("gss", delta);
    out.note("delta " + fmt(delta) + ": gd " + fmt(gd) + " gss " + fmt(gss));
    if (!(gd <= gss)) {
      out.fail("delta " + fmt(delta) + ": gd " + fmt(gd) + " > gss " +
               fmt(gss));
    }
  }
  return out;
}

Outcome evaluation_budget() {
  Outcome out;
  const auto& run = table_one_run();
  for (double delta : kDeltas) {
    const auto* gd = find_row(run.report, "gd", delta);
    const auto* gss = find_row(run.report, "gss", delta);
    if (gd == nullptr || gss == nullptr || gd->error || gss->error) {
      out.fail("missing run at delta " + fmt(delta));
      continue;
    }
    const int gd_total = gd->energy_evals + gd->gradient_evals;
    out.note(std::to_string(gd_total) + "<" +
             std::to_string(gss->energy_evals));
    if (!(gd_total < gss->energy_evals)) {
      out.fail("delta " + fmt(delta) + ": gd " + std::to_string(gd_total) +
               " vs gss " + std::to_string(gss->energy_evals));
    }
  }
  return out;
}

std::string report_text(const std::vector<BenchItem>& items) {
  BenchSettings s;
  s.lambda0 = 3e-9;
  std::ostringstream os;
  write_bench_csv(run_iters_vs_delta(items, s), os, false);
  return os.str();
}

Outcome properties() {
  Outcome out;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> coord(-500.0, 500.0);
  std::uniform_real_distribution<double> angle(-1.5, 1.5);

  for (int i = 0; i < 1000; ++i) {
    const double u = coord(rng), v = coord(rng);
    const double a = angle(rng), b = angle(rng);
    const auto p = rotate_coord(u, v, a);
    const double scale = std::max(1.0, std::hypot(u, v));
    if (std::abs(std::hypot(p.x, p.y) - std::hypot(u, v)) > 1e-9 * scale) {
      out.fail("rotation is not an isometry");
      break;
    }
    const auto q = rotate_coord(p.x, p.y, b);
    const auto r = rotate_coord(u, v, a + b);
    if (std::abs(q.x - r.x) > 1e-9 * scale ||
        std::abs(q.y - r.y) > 1e-9 * scale) {
      out.fail("rotations do not compose");
      break;
    }
  }

  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = random_instance(rng, 150);
    const double theta = angle(rng);
    const auto fit = fit_parabola(inst.samples, theta);
    std::array<double, 3> normal{};
    double dnorm = 0.0;
    for (const auto& p : inst.samples) {
      const double y = rotate_coord(p.u, p.v, theta).y;
      const double res =
          p.d - (fit.alpha[0] + fit.alpha[1] * y + fit.alpha[2] * y * y);
      normal[0] += res;
      normal[1] += res * y;
      normal[2] += res * y * y;
      dnorm += p.d * p.d;
    }
    dnorm = std::sqrt(dnorm);
    if (!(fit.e_min >= 0.0) ||
        std::any_of(normal.begin(), normal.end(),
                    [&](double x) { return std::abs(x) > 1e-7 * dnorm; })) {
      out.fail("residual not orthogonal in trial " + std::to_string(trial));
      break;
    }
  }

  for (int trial = 0; trial < 3; ++trial) {
    const auto inst = random_instance(rng, 400, 320, 240, 0.5);
    const double c = 0.37;
    auto scaled = inst.samples;
    for (auto& p : scaled) p.d *= c;
    SolverConfig cfg;
    cfg.method = Method::kGrid;
    cfg.theta_lo = -0.35;
    cfg.theta_hi = 0.35;
    cfg.grid_step = 1e-3;
    if (solve_grid(inst.samples, cfg).theta_hat !=
        solve_grid(scaled, cfg).theta_hat) {
      out.fail("grid argmin changes under scaling");
    }
    cfg.theta_lo = inst.true_theta - 0.05;
    cfg.theta_hi = inst.true_theta + 0.05;
    cfg.delta_theta = kDeltaTheta1e5;
    cfg.theta0 = inst.true_theta;
    cfg.lambda0 = 1e-9;
    const auto a = solve_gd(inst.samples, cfg);
    cfg.lambda0 /= c * c;
    const auto b = solve_gd(scaled, cfg);
    if (std::abs(a.theta_hat - b.theta_hat) > 1e-9) {
      out.fail("gd argmin changes under scaling");
    }
  }

  const auto dir = std::filesystem::temp_directory_path() /
                   ("rollfit_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  DisparityMap map(37, 23);
  std::uniform_real_distribution<double> disp(0.0, 200.0);
  for (int v = 0; v < map.height(); ++v) {
    for (int u = 0; u < map.width(); ++u) {
      if ((u * 7 + v) % 5 != 0) map.set(u, v, disp(rng));
    }
  }
  map.set(36, 22, 1e-300);
  save_disparity(map, dir / "m.csv", MapFormat::kCsv);
  LoadOptions opts;
  opts.width = map.width();
  opts.height = map.height();
  if (!(load_disparity(dir / "m.csv", MapFormat::kCsv, opts) == map)) {
    out.fail("csv round trip is not exact");
  }
  std::filesystem::remove_all(dir);

  const std::vector<BenchItem> items{{"a", synth(0.03, 0.5, 3), 0.03},
                                     {"b", synth(-0.05, 0.5, 4), -0.05}};
  setenv("ROLLFIT_THREADS", "1", 1);
  const auto one = report_text(items);
  const auto rotated_one = rotate_map(generate_synthetic({}), 0.07);
  setenv("ROLLFIT_THREADS", "4", 1);
  const auto four = report_text(items);
  const auto rotated_four = rotate_map(generate_synthetic({}), 0.07);
  unsetenv("ROLLFIT_THREADS");
  if (one != four || !(rotated_one == rotated_four)) {
    out.fail("reports differ between 1 and 4 threads");
  }
  out.note("rotation, orthogonality, scaling, csv, threads");
  return out;
}

struct Criterion {
  int id;
  std::string name;
  double budget_s;  // 0: no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "gss iteration counts", 1.0, gss_counts},
      {2, "gd iteration counts", 5.0, gd_counts},
      {3, "rotate and recover", 60.0, rotate_and_recover},
      {4, "gradient vs finite differences", 10.0, gradient_check},
      {5, "fit and contraction vs oracle", 5.0, fit_oracle},
      {6, "accuracy vs delta shape", 60.0, accuracy_shape},
      {7, "evaluation budget", 0.0, evaluation_budget},
      {8, "property suites", 0.0, properties},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    if (c.budget_s > 0 && secs >= c.budget_s) {
      out.fail("took " + fmt(secs) + " s, budget " + fmt(c.budget_s) + " s");
    }
    if (!out.pass) ++failures;
    std::printf("AC%d %s: %s (%.2f s) %s\n", c.id, out.pass ? "PASS" : "FAIL",
                c.name.c_str(), secs, out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

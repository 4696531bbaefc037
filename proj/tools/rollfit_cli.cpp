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

// rollfit: roll-angle estimation from dense disparity maps.
//
//   rollfit estimate --map road.pgm --method gd
//   rollfit synth --size 400x400 --alpha 2,0.15,1e-4 --roll 0.03 --out s.pgm
//   rollfit rotate --map road.pgm --theta -0.03 --out level.pgm
//   rollfit vdisp --map road.pgm --bins 128 --d-max 128 --out vd.pgm
//   rollfit bench --protocol iters_vs_delta --out table.csv
//
// Exit codes: 0 success (estimate: converged), 1 estimate stopped without
// converging, 2 bad input (arguments, files, formats), 3 degenerate geometry.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rollfit/bench.hpp"
#include "rollfit/disparity_map.hpp"
#include "rollfit/errors.hpp"
#include "rollfit/optimizers.hpp"
#include "rollfit/rotation.hpp"

namespace {

using namespace rollfit;

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitDegenerate = 3;

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

std::string fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  std::string s(buf);
  if (s == "-0.000000") s.erase(0, 1);
  return s;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument(std::string("bad number '") + item + "' in " + what);
    }
  }
  if (out.empty()) throw InvalidArgument(std::string("empty list for ") + what);
  return out;
}

void parse_size(const std::string& text, int& width, int& height) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t a = 0, b = 0;
    width = std::stoi(text.substr(0, x), &a);
    height = std::stoi(text.substr(x + 1), &b);
    if (a != x || b != text.size() - x - 1) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw InvalidArgument("bad size '" + text + "' (expected WxH)");
  }
}

struct SynthFlags {
  std::string size = "400x400";
  std::string alpha = "2,0.15,1e-4";
  double roll = 0.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--size", size, "Map size WxH")->capture_default_str();
    cmd->add_option("--alpha", alpha, "Road parabola a0,a1,a2")
        ->capture_default_str();
    cmd->add_option("--roll", roll, "Ground-truth roll")->capture_default_str();
    cmd->add_option("--sigma", sigma, "Disparity noise standard deviation")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "Noise seed")->capture_default_str();
  }

  SyntheticRoadSpec spec(double angle_unit) const {
    SyntheticRoadSpec s;
    parse_size(size, s.width, s.height);
    const auto a = parse_list(alpha, "--alpha");
    if (a.size() != 3) throw InvalidArgument("--alpha needs three values");
    s.alpha0 = a[0];
    s.alpha1 = a[1];
    s.alpha2 = a[2];
    s.true_roll = roll * angle_unit;
    s.noise_sigma = sigma;
    s.seed = seed;
    s.validate();
    return s;
  }
};

void write_trace(const SolverReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  auto opt = [](const std::optional<double>& v) {
    std::ostringstream s;
    s.precision(17);
    if (v) s << *v;
    return s.str();
  };
  out.precision(17);
  out << "k,theta,e_min,grad,lambda\n";
  for (const auto& r : report.trace) {
    out << r.k << ',' << r.theta << ',' << r.e_min << ',' << opt(r.grad) << ','
        << opt(r.lambda) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

bool in_roll_domain(double theta) {
  return theta > -std::numbers::pi / 2 && theta <= std::numbers::pi / 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Roll-angle estimation from dense disparity maps"};
  app.require_subcommand(1);
  app.fallthrough();

  bool degrees = false;
  app.add_flag("--degrees", degrees,
               "Angle-valued flags are given in degrees instead of radians");
  double scale = 1.0;
  app.add_option("--scale", scale, "pgm16 disparity scale (d = raw / scale)")
      ->capture_default_str();

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Estimate the roll angle");
  std::string map_path, mask_path, trace_path, method_name = "gd";
  SolverConfig config;
  estimate->add_option("--map", map_path, "Disparity map (.pgm or .csv)")
      ->required();
  estimate->add_option("--mask", mask_path, "8-bit pgm selection mask");
  estimate->add_option("--method", method_name, "gd, gss, grid or plane")
      ->capture_default_str();
  auto* opt_delta_theta = estimate->add_option("--delta-theta", config.delta_theta,
                       "Convergence threshold")
      ->capture_default_str();
  estimate->add_option("--lambda0", config.lambda0, "Initial GD learning rate")
      ->capture_default_str();
  auto* opt_theta0 = estimate->add_option("--theta0", config.theta0, "Initial GD iterate")
      ->capture_default_str();
  estimate->add_option("--max-iters", config.max_iters, "Iteration cap")
      ->capture_default_str();
  auto* opt_theta_lo = estimate->add_option("--theta-lo", config.theta_lo, "Search interval start")
      ->capture_default_str();
  auto* opt_theta_hi = estimate->add_option("--theta-hi", config.theta_hi, "Search interval end")
      ->capture_default_str();
  auto* opt_grid_step = estimate->add_option("--grid-step", config.grid_step, "Grid spacing")
      ->capture_default_str();
  estimate->add_option("--trace", trace_path, "Write the iterate trace as CSV");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic road map");
  SynthFlags synth_flags;
  std::string synth_out;
  synth_flags.add_to(synth);
  synth->add_option("--out", synth_out, "Output map (.pgm or .csv)")->required();

  // rotate
  auto* rotate = app.add_subcommand("rotate", "Rotate a map by theta");
  std::string rotate_in, rotate_out;
  double rotate_theta = 0.0;
  rotate->add_option("--map", rotate_in, "Input map")->required();
  rotate->add_option("--theta", rotate_theta, "Rotation angle")->required();
  rotate->add_option("--out", rotate_out, "Output map (.pgm or .csv)")
      ->required();

  // vdisp
  auto* vdisp = app.add_subcommand("vdisp", "Write the v-disparity image");
  std::string vdisp_in, vdisp_out;
  int bins = 128;
  double d_max = 128.0;
  vdisp->add_option("--map", vdisp_in, "Input map")->required();
  vdisp->add_option("--bins", bins, "Disparity bins")->capture_default_str();
  vdisp->add_option("--d-max", d_max, "Largest binned disparity")
      ->capture_default_str();
  vdisp->add_option("--out", vdisp_out, "Output 8-bit pgm")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "Run a benchmark protocol");
  std::string protocol_name, bench_out, dataset_dir, lambda0_text = "26";
  std::string rolls_text, deltas_text, lambdas_text, methods_text = "gss,gd";
  int frames = 1;
  int bench_max_iters = 100;
  bool summary = false;
  SynthFlags bench_synth;
  bench_synth.roll = 0.03;
  bench->add_option("--protocol", protocol_name,
                    "iters_vs_delta, lambda_sweep or accuracy_vs_delta")
      ->required();
  bench->add_option("--out", bench_out, "Report CSV")->required();
  bench->add_option("--dataset", dataset_dir,
                    "Directory of maps (optional truth.csv: file,theta)");
  bench_synth.add_to(bench);
  bench->add_option("--rolls", rolls_text,
                    "Comma-separated ground-truth rolls (overrides --roll)");
  bench->add_option("--frames", frames, "Synthetic frames per roll")
      ->capture_default_str();
  bench->add_option("--methods", methods_text, "Methods to compare")
      ->capture_default_str();
  bench->add_option("--deltas", deltas_text,
                    "Comma-separated thresholds (default: 0.1, 0.01, 0.001, "
                    "0.0001 degrees)");
  bench->add_option("--lambda0", lambda0_text,
                    "GD initial learning rate, or 'tune' to pick it by sweep")
      ->capture_default_str();
  bench->add_option("--lambdas", lambdas_text, "Candidates for lambda_sweep");
  bench->add_option("--max-iters", bench_max_iters, "Iteration cap")
      ->capture_default_str();
  bench->add_flag("--summary", summary, "Print per-cell means to stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  const double unit = degrees ? 1.0 / kRadToDeg : 1.0;
  LoadOptions load_options;
  load_options.scale = scale;
  auto load = [&](const std::string& path) {
    return load_disparity(path, format_from_path(path), load_options);
  };

  try {
    if (estimate->parsed()) {
      config.method = parse_method(method_name);
      // Only user-supplied angles are in degrees; defaults are radians.
      if (opt_delta_theta->count()) config.delta_theta *= unit;
      if (opt_theta0->count()) config.theta0 *= unit;
      if (opt_theta_lo->count()) config.theta_lo *= unit;
      if (opt_theta_hi->count()) config.theta_hi *= unit;
      if (opt_grid_step->count()) config.grid_step *= unit;
      if (config.method != Method::kPlane) config.validate();
      const auto map = load(map_path);
      std::optional<Mask> mask;
      if (!mask_path.empty()) mask = load_mask(mask_path);
      const auto samples = samples_of(map, mask ? &*mask : nullptr);
      if (samples.empty()) {
        throw EmptyMapError("mask selects no valid disparities");
      }
      const auto report = solve(samples, config);
      std::cout << "method: " << to_string(config.method) << '\n'
                << "samples: " << samples.size() << '\n'
                << "theta_hat: " << fixed6(report.theta_hat) << " rad ("
                << fixed6(report.theta_hat * kRadToDeg) << " deg)\n"
                << "iterations: " << report.iterations << '\n'
                << "energy_evals: " << report.energy_evals << '\n'
                << "gradient_evals: " << report.gradient_evals << '\n'
                << "termination: " << to_string(report.termination) << '\n';
      if (!trace_path.empty()) write_trace(report, trace_path);
      return report.termination == Termination::kConverged ? kExitOk
                                                           : kExitNotConverged;
    }

    if (synth->parsed()) {
      const auto spec = synth_flags.spec(unit);
      const auto map = generate_synthetic(spec);
      save_disparity(map, synth_out, format_from_path(synth_out), scale);
      std::cout << "true_roll: " << fixed6(spec.true_roll) << " rad ("
                << fixed6(spec.true_roll * kRadToDeg) << " deg)\n"
                << "valid: " << map.valid_count() << '\n';
      return kExitOk;
    }

    if (rotate->parsed()) {
      const double theta = rotate_theta * unit;
      if (!in_roll_domain(theta)) {
        throw InvalidArgument("--theta must lie in (-pi/2, pi/2]");
      }
      const auto out = rotate_map(load(rotate_in), theta);
      save_disparity(out, rotate_out, format_from_path(rotate_out), scale);
      return kExitOk;
    }

    if (vdisp->parsed()) {
      save_v_disparity(v_disparity(load(vdisp_in), bins, d_max), vdisp_out);
      return kExitOk;
    }

    if (bench->parsed()) {
      const auto protocol = parse_protocol(protocol_name);
      BenchSettings settings;
      settings.max_iters = bench_max_iters;
      settings.methods.clear();
      for (std::stringstream ss(methods_text); std::getline(ss, method_name, ',');) {
        settings.methods.push_back(parse_method(method_name));
      }
      if (!deltas_text.empty()) {
        settings.deltas = parse_list(deltas_text, "--deltas");
        for (auto& d : settings.deltas) d *= unit;
      }
      if (!lambdas_text.empty()) {
        settings.lambdas = parse_list(lambdas_text, "--lambdas");
      }

      std::vector<BenchItem> items;
      if (!dataset_dir.empty()) {
        items = dataset_items(dataset_dir, load_options);
      } else {
        const auto base = bench_synth.spec(unit);
        std::vector<double> rolls{base.true_roll};
        if (!rolls_text.empty()) {
          rolls = parse_list(rolls_text, "--rolls");
          for (auto& r : rolls) r *= unit;
        }
        items = synthetic_items(base, frames, rolls);
      }

      if (lambda0_text == "tune") {
        settings.lambda0 = tune_lambda0(items, settings);
        std::cerr << "tuned lambda0: " << settings.lambda0 << '\n';
      } else {
        settings.lambda0 = parse_list(lambda0_text, "--lambda0").at(0);
      }

      const auto report = run_protocol(protocol, items, settings);
      std::ofstream out(bench_out);
      if (!out) throw IoError("cannot write '" + bench_out + "'");
      write_bench_csv(report, out);
      if (!out) throw IoError("failed writing '" + bench_out + "'");
      for (const auto& row : report.rows) {
        if (row.error) std::cerr << "error: " << *row.error << '\n';
      }
      if (summary) {
        std::cout << "method,delta_theta,lambda0,items,failures,"
                     "mean_iterations,mean_evals,mean_abs_error\n";
        for (const auto& c : summarize(report)) {
          std::cout << c.method << ',' << c.delta_theta << ',' << c.lambda0
                    << ',' << c.items << ',' << c.failures << ','
                    << c.mean_iterations << ',' << c.mean_evals << ',';
          if (c.mean_abs_error) std::cout << *c.mean_abs_error;
          std::cout << '\n';
        }
      }
      return report.succeeded() > 0 ? kExitOk : kExitBadInput;
    }
  } catch (const DegenerateGeometryError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const InsufficientDataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitBadInput;
}

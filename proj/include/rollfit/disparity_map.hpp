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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace rollfit {

// Dense disparity grid with a per-cell validity flag, stored row-major.
// Cells flagged valid always hold a finite, non-negative disparity.
class DisparityMap {
 public:
  // All cells invalid.
  DisparityMap(int width, int height);
  DisparityMap(int width, int height, std::vector<double> values,
               std::vector<std::uint8_t> valid);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  double at(int u, int v) const { return values_[index(u, v)]; }
  bool is_valid(int u, int v) const { return valid_[index(u, v)] != 0; }

  // Marks the cell valid. Throws InvalidArgument on a negative or
  // non-finite disparity.
  void set(int u, int v, double d);
  void invalidate(int u, int v);

  std::span<const double> values() const { return values_; }
  std::span<const std::uint8_t> valid() const { return valid_; }

  std::size_t valid_count() const;

  bool operator==(const DisparityMap&) const = default;

 private:
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(u);
  }

  int width_;
  int height_;
  std::vector<double> values_;
  std::vector<std::uint8_t> valid_;
};

// Boolean selection grid with the same shape as a DisparityMap.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> include;  // row-major, nonzero = selected

  static Mask all(int width, int height, bool value);
};

// One measured cell: column u, row v, disparity d (all in pixels).
struct PixelSample {
  double u = 0.0;
  double v = 0.0;
  double d = 0.0;

  bool operator==(const PixelSample&) const = default;
};

enum class MapFormat { kPgm16, kCsv };

// Picks the format from a file extension (".pgm" or ".csv").
MapFormat format_from_path(const std::filesystem::path& path);

struct LoadOptions {
  // pgm16 only: disparity = raw / scale.
  double scale = 1.0;
  // csv only: grid size. When absent the grid is the bounding box of the
  // listed cells.
  std::optional<int> width;
  std::optional<int> height;
};

DisparityMap load_disparity(const std::filesystem::path& path, MapFormat format,
                            const LoadOptions& options = {});

// pgm16 writes round(d * scale), with valid cells kept at raw >= 1 so they
// never alias the "no measurement" code 0.
void save_disparity(const DisparityMap& map, const std::filesystem::path& path,
                    MapFormat format, double scale = 1.0);

// 8-bit P5 mask; 0 excludes a cell, anything else includes it.
Mask load_mask(const std::filesystem::path& path);
void save_mask(const Mask& mask, const std::filesystem::path& path);

// Valid (and mask-selected) cells in row-major order.
std::vector<PixelSample> samples_of(const DisparityMap& map,
                                    const Mask* mask = nullptr);

// Ground truth for a synthetic road: d = a0 + a1*y + a2*y^2 where y is the
// row coordinate after removing true_roll.
struct SyntheticRoadSpec {
  int width = 400;
  int height = 400;
  double alpha0 = 2.0;
  double alpha1 = 0.15;
  double alpha2 = 1e-4;
  double true_roll = 0.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  // Throws InvalidArgument when a field is out of range.
  void validate() const;
};

DisparityMap generate_synthetic(const SyntheticRoadSpec& spec);

}  // namespace rollfit

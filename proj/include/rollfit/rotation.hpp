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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "rollfit/disparity_map.hpp"

namespace rollfit {

// Pixel coordinates expressed in a frame rotated by theta about the
// top-left pixel.
struct RotatedCoord {
  double x = 0.0;
  double y = 0.0;
};

// x = u cos(theta) + v sin(theta),  y = v cos(theta) - u sin(theta).
inline RotatedCoord rotate_coord(double u, double v, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {u * c + v * s, v * c - u * s};
}

struct RotatedCoordDerivative {
  double dx_dtheta = 0.0;
  double dy_dtheta = 0.0;
};

// d/dtheta of rotate_coord, which is (y, -x).
inline RotatedCoordDerivative rotate_coord_derivative(double u, double v,
                                                      double theta) {
  const auto r = rotate_coord(u, v, theta);
  return {r.y, -r.x};
}

// Resamples the map into the frame rotated by theta, nearest neighbor.
// Output cell (x, y) reads input cell rotate_coord(x, y, -theta); sources
// off the grid or invalid leave the output cell invalid.
DisparityMap rotate_map(const DisparityMap& map, double theta);

// Per-row disparity histogram.
struct VDisparityMap {
  int rows = 0;
  int disparity_bins = 0;
  std::vector<std::uint32_t> counts;  // rows x disparity_bins, row-major

  std::uint32_t at(int row, int bin) const {
    return counts[static_cast<std::size_t>(row) *
                      static_cast<std::size_t>(disparity_bins) +
                  static_cast<std::size_t>(bin)];
  }
  std::uint64_t total() const;
};

// Bin b of row v counts valid cells with floor(d / d_max * bins) == b;
// d == d_max goes to the top bin and d > d_max is dropped.
VDisparityMap v_disparity(const DisparityMap& map, int disparity_bins,
                          double d_max);

// 8-bit P5 image, one column per bin, counts clamped to 255.
void save_v_disparity(const VDisparityMap& vdisp,
                      const std::filesystem::path& path);

}  // namespace rollfit

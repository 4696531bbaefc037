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

#include "rollfit/rotation.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "rollfit/errors.hpp"
#include "rollfit/parallel.hpp"

namespace rollfit {

DisparityMap rotate_map(const DisparityMap& map, double theta) {
  if (!std::isfinite(theta)) throw InvalidArgument("theta must be finite");
  const int w = map.width();
  const int h = map.height();
  std::vector<double> values(map.size(), 0.0);
  std::vector<std::uint8_t> valid(map.size(), 0);
  const double c = std::cos(theta);
  const double s = std::sin(theta);

  // Rows are independent and each writes only its own cells.
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < w; ++x) {
      // rotate_coord(x, y, -theta)
      const double su = x * c - y * s;
      const double sv = y * c + x * s;
      const long iu = std::lround(su);
      const long iv = std::lround(sv);
      if (iu < 0 || iv < 0 || iu >= w || iv >= h) continue;
      const int u = static_cast<int>(iu);
      const int v = static_cast<int>(iv);
      if (!map.is_valid(u, v)) continue;
      const std::size_t k = row * static_cast<std::size_t>(w) +
                            static_cast<std::size_t>(x);
      values[k] = map.at(u, v);
      valid[k] = 1;
    }
  });
  return DisparityMap(w, h, std::move(values), std::move(valid));
}

std::uint64_t VDisparityMap::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

VDisparityMap v_disparity(const DisparityMap& map, int disparity_bins,
                          double d_max) {
  if (disparity_bins < 1) throw InvalidArgument("need at least one bin");
  if (!(d_max > 0.0) || !std::isfinite(d_max)) {
    throw InvalidArgument("d_max must be positive");
  }
  VDisparityMap out{map.height(), disparity_bins,
                    std::vector<std::uint32_t>(
                        static_cast<std::size_t>(map.height()) *
                        static_cast<std::size_t>(disparity_bins))};
  parallel_for(static_cast<std::size_t>(map.height()), [&](std::size_t row) {
    const int v = static_cast<int>(row);
    auto* hist = out.counts.data() + row * static_cast<std::size_t>(disparity_bins);
    for (int u = 0; u < map.width(); ++u) {
      if (!map.is_valid(u, v)) continue;
      const double d = map.at(u, v);
      if (d > d_max) continue;
      const auto bin = std::min(
          disparity_bins - 1,
          static_cast<int>(std::floor(d / d_max * disparity_bins)));
      ++hist[bin];
    }
  });
  return out;
}

void save_v_disparity(const VDisparityMap& vdisp,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "P5\n" << vdisp.disparity_bins << ' ' << vdisp.rows << "\n255\n";
  for (auto count : vdisp.counts) {
    out.put(static_cast<char>(std::min<std::uint32_t>(count, 255)));
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace rollfit

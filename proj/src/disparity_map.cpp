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

#include "rollfit/disparity_map.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include "rollfit/errors.hpp"
#include "rollfit/rotation.hpp"

namespace rollfit {

namespace {

std::string describe(const std::filesystem::path& path) {
  return "'" + path.string() + "'";
}

std::vector<char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + describe(path));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + describe(path));
  return out;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

struct PnmHeader {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::size_t data_offset = 0;
};

// Reads "P5 <w> <h> <maxval>" with optional '#' comments, leaving the
// offset just past the single whitespace that ends the header.
PnmHeader parse_pnm_header(const std::vector<char>& bytes,
                           const std::filesystem::path& path) {
  std::size_t pos = 0;
  auto fail = [&](const std::string& what) -> ParseError {
    return ParseError(describe(path) + ": " + what + " at byte offset " +
                      std::to_string(pos));
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw fail("expected magic 'P5'");
  }
  pos = 2;
  auto next_int = [&](const char* name) {
    for (;;) {
      while (pos < bytes.size() && is_space(bytes[pos])) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    int value = 0;
    const char* first = bytes.data() + pos;
    const char* last = bytes.data() + bytes.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || value <= 0) {
      throw fail(std::string("bad ") + name);
    }
    pos += static_cast<std::size_t>(ptr - first);
    return value;
  };
  PnmHeader h;
  h.width = next_int("width");
  h.height = next_int("height");
  h.maxval = next_int("maxval");
  if (pos >= bytes.size() || !is_space(bytes[pos])) {
    throw fail("missing whitespace after maxval");
  }
  h.data_offset = pos + 1;
  return h;
}

void write_pnm_header(std::ofstream& out, int width, int height, int maxval) {
  out << "P5\n" << width << ' ' << height << '\n' << maxval << '\n';
}

DisparityMap load_pgm16(const std::filesystem::path& path, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidArgument("pgm16 scale must be positive");
  }
  const auto bytes = read_all(path);
  const auto h = parse_pnm_header(bytes, path);
  if (h.maxval != 65535) {
    throw ParseError(describe(path) + ": pgm16 requires maxval 65535, got " +
                     std::to_string(h.maxval));
  }
  const std::size_t cells =
      static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
  if (bytes.size() - h.data_offset < 2 * cells) {
    throw ParseError(describe(path) + ": truncated pixel data at byte offset " +
                     std::to_string(bytes.size()));
  }
  DisparityMap map(h.width, h.height);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) +
                  h.data_offset;
  for (int v = 0; v < h.height; ++v) {
    for (int u = 0; u < h.width; ++u, p += 2) {
      const unsigned raw = (unsigned{p[0]} << 8) | unsigned{p[1]};
      if (raw != 0) map.set(u, v, raw / scale);
    }
  }
  return map;
}

template <typename T>
bool parse_field(std::string_view field, T& out) {
  const char* first = field.data();
  const char* last = first + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

DisparityMap load_csv(const std::filesystem::path& path,
                      const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + describe(path));

  struct Row {
    int u, v;
    double d;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) -> ParseError {
    return ParseError(describe(path) + ": " + what + " on line " +
                      std::to_string(line_no));
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "u,v,d") throw fail("expected header 'u,v,d'");
      continue;
    }
    if (line.empty()) continue;
    const std::string_view sv(line);
    const auto c1 = sv.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : sv.find(',', c1 + 1);
    if (c2 == std::string_view::npos ||
        sv.find(',', c2 + 1) != std::string_view::npos) {
      throw fail("expected three comma-separated fields");
    }
    Row r{};
    if (!parse_field(sv.substr(0, c1), r.u) || r.u < 0) {
      throw fail("bad column index");
    }
    if (!parse_field(sv.substr(c1 + 1, c2 - c1 - 1), r.v) || r.v < 0) {
      throw fail("bad row index");
    }
    if (!parse_field(sv.substr(c2 + 1), r.d) || !std::isfinite(r.d) ||
        r.d < 0.0) {
      throw fail("bad disparity");
    }
    rows.push_back(r);
  }
  if (line_no == 0) throw fail("expected header 'u,v,d'");
  if (rows.empty() && !(options.width && options.height)) {
    throw EmptyMapError(describe(path) + ": no valid disparities");
  }

  int width = 0;
  int height = 0;
  for (const auto& r : rows) {
    width = std::max(width, r.u + 1);
    height = std::max(height, r.v + 1);
  }
  if (options.width) {
    if (*options.width < width) {
      throw ParseError(describe(path) + ": column index exceeds width " +
                       std::to_string(*options.width));
    }
    width = *options.width;
  }
  if (options.height) {
    if (*options.height < height) {
      throw ParseError(describe(path) + ": row index exceeds height " +
                       std::to_string(*options.height));
    }
    height = *options.height;
  }
  DisparityMap map(width, height);
  for (const auto& r : rows) map.set(r.u, r.v, r.d);
  return map;
}

}  // namespace

DisparityMap::DisparityMap(int width, int height)
    : DisparityMap(width, height,
                   std::vector<double>(static_cast<std::size_t>(
                       std::max(width, 0) * std::max(height, 0))),
                   std::vector<std::uint8_t>(static_cast<std::size_t>(
                       std::max(width, 0) * std::max(height, 0)))) {}

DisparityMap::DisparityMap(int width, int height, std::vector<double> values,
                           std::vector<std::uint8_t> valid)
    : width_(width),
      height_(height),
      values_(std::move(values)),
      valid_(std::move(valid)) {
  if (width <= 0 || height <= 0) {
    throw InvalidArgument("map dimensions must be positive");
  }
  const auto cells =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (values_.size() != cells || valid_.size() != cells) {
    throw ShapeError("value/validity grids do not match " +
                     std::to_string(width) + "x" + std::to_string(height));
  }
  for (std::size_t i = 0; i < cells; ++i) {
    if (valid_[i] && !(std::isfinite(values_[i]) && values_[i] >= 0.0)) {
      throw InvalidArgument("valid cell holds a negative or non-finite value");
    }
  }
}

void DisparityMap::set(int u, int v, double d) {
  if (!std::isfinite(d) || d < 0.0) {
    throw InvalidArgument("disparity must be finite and non-negative");
  }
  values_[index(u, v)] = d;
  valid_[index(u, v)] = 1;
}

void DisparityMap::invalidate(int u, int v) {
  values_[index(u, v)] = 0.0;
  valid_[index(u, v)] = 0;
}

std::size_t DisparityMap::valid_count() const {
  return static_cast<std::size_t>(
      std::count_if(valid_.begin(), valid_.end(), [](auto f) { return f; }));
}

Mask Mask::all(int width, int height, bool value) {
  return {width, height,
          std::vector<std::uint8_t>(static_cast<std::size_t>(width) *
                                        static_cast<std::size_t>(height),
                                    value ? 1 : 0)};
}

MapFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".pgm") return MapFormat::kPgm16;
  if (ext == ".csv") return MapFormat::kCsv;
  throw InvalidArgument("unknown map format for " + describe(path) +
                        " (expected .pgm or .csv)");
}

DisparityMap load_disparity(const std::filesystem::path& path, MapFormat format,
                            const LoadOptions& options) {
  DisparityMap map = format == MapFormat::kPgm16
                         ? load_pgm16(path, options.scale)
                         : load_csv(path, options);
  if (map.valid_count() == 0) {
    throw EmptyMapError(describe(path) + ": no valid disparities");
  }
  return map;
}

void save_disparity(const DisparityMap& map, const std::filesystem::path& path,
                    MapFormat format, double scale) {
  auto out = open_out(path);
  if (format == MapFormat::kCsv) {
    std::string body = "u,v,d\n";
    char buf[64];
    for (int v = 0; v < map.height(); ++v) {
      for (int u = 0; u < map.width(); ++u) {
        if (!map.is_valid(u, v)) continue;
        body += std::to_string(u);
        body += ',';
        body += std::to_string(v);
        body += ',';
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, map.at(u, v));
        body.append(buf, ptr);
        body += '\n';
      }
    }
    out << body;
  } else {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw InvalidArgument("pgm16 scale must be positive");
    }
    write_pnm_header(out, map.width(), map.height(), 65535);
    std::string data(2 * map.size(), '\0');
    std::size_t k = 0;
    for (int v = 0; v < map.height(); ++v) {
      for (int u = 0; u < map.width(); ++u) {
        unsigned raw = 0;
        if (map.is_valid(u, v)) {
          const double scaled = std::round(map.at(u, v) * scale);
          if (scaled > 65535.0) {
            throw InvalidArgument("disparity " + std::to_string(map.at(u, v)) +
                                  " exceeds the pgm16 range at scale " +
                                  std::to_string(scale));
          }
          raw = std::max(1u, static_cast<unsigned>(scaled));
        }
        data[k++] = static_cast<char>(raw >> 8);
        data[k++] = static_cast<char>(raw & 0xFF);
      }
    }
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
  }
  if (!out) throw IoError("failed writing " + describe(path));
}

Mask load_mask(const std::filesystem::path& path) {
  const auto bytes = read_all(path);
  const auto h = parse_pnm_header(bytes, path);
  if (h.maxval != 255) {
    throw ParseError(describe(path) + ": mask requires maxval 255, got " +
                     std::to_string(h.maxval));
  }
  const std::size_t cells =
      static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
  if (bytes.size() - h.data_offset < cells) {
    throw ParseError(describe(path) + ": truncated pixel data at byte offset " +
                     std::to_string(bytes.size()));
  }
  Mask mask{h.width, h.height, std::vector<std::uint8_t>(cells)};
  for (std::size_t i = 0; i < cells; ++i) {
    mask.include[i] = bytes[h.data_offset + i] != 0 ? 1 : 0;
  }
  return mask;
}

void save_mask(const Mask& mask, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_pnm_header(out, mask.width, mask.height, 255);
  for (auto flag : mask.include) out.put(flag ? char(255) : char(0));
  if (!out) throw IoError("failed writing " + describe(path));
}

std::vector<PixelSample> samples_of(const DisparityMap& map, const Mask* mask) {
  if (mask != nullptr &&
      (mask->width != map.width() || mask->height != map.height() ||
       mask->include.size() != map.size())) {
    throw ShapeError("mask is " + std::to_string(mask->width) + "x" +
                     std::to_string(mask->height) + " but map is " +
                     std::to_string(map.width()) + "x" +
                     std::to_string(map.height()));
  }
  std::vector<PixelSample> out;
  out.reserve(map.valid_count());
  std::size_t i = 0;
  for (int v = 0; v < map.height(); ++v) {
    for (int u = 0; u < map.width(); ++u, ++i) {
      if (!map.valid()[i]) continue;
      if (mask != nullptr && !mask->include[i]) continue;
      out.push_back({double(u), double(v), map.values()[i]});
    }
  }
  return out;
}

void SyntheticRoadSpec::validate() const {
  constexpr double kHalfPi = 1.57079632679489661923;
  if (width < 2 || height < 2) {
    throw InvalidArgument("synthetic map must be at least 2x2");
  }
  if (!(true_roll > -kHalfPi && true_roll <= kHalfPi)) {
    throw InvalidArgument("true roll must lie in (-pi/2, pi/2]");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw InvalidArgument("noise sigma must be finite and non-negative");
  }
  if (!std::isfinite(alpha0) || !std::isfinite(alpha1) ||
      !std::isfinite(alpha2)) {
    throw InvalidArgument("road coefficients must be finite");
  }
}

DisparityMap generate_synthetic(const SyntheticRoadSpec& spec) {
  spec.validate();
  DisparityMap map(spec.width, spec.height);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma);
  for (int v = 0; v < spec.height; ++v) {
    for (int u = 0; u < spec.width; ++u) {
      const double y = rotate_coord(u, v, spec.true_roll).y;
      double d = spec.alpha0 + spec.alpha1 * y + spec.alpha2 * y * y;
      if (spec.noise_sigma > 0.0) d += noise(rng);
      if (d >= 0.0) map.set(u, v, d);
    }
  }
  return map;
}

}  // namespace rollfit

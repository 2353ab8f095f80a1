// Copyright 2026 The topoinpaint Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Pixel grids and the discrete differential operators shared by every
// module. All grids are row-major; index = y * width + x.
//
// The grid is cell-centered on the unit square: pixel (i, j) sits at
// ((i + 1/2) h, (j + 1/2) h) with h = 1 / max(width, height). The
// homogeneous Neumann condition is discretized by mirroring across the
// boundary face (ghost(-1) = f(0)), which gives a symmetric stencil whose
// rows sum to zero.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace topoinpaint {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major grid of reals with no range constraint.
class Field {
 public:
  Field() = default;
  Field(std::size_t width, std::size_t height, double fill = 0.0)
      : width_(width), height_(height), data_(width * height, fill) {}
  Field(std::size_t width, std::size_t height, std::vector<double> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != width_ * height_) {
      throw DimensionError("Field: data length " +
                           std::to_string(data_.size()) + " != " +
                           std::to_string(width_) + "x" +
                           std::to_string(height_));
    }
  }

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t x, std::size_t y) {
    return data_[y * width_ + x];
  }
  double operator()(std::size_t x, std::size_t y) const {
    return data_[y * width_ + x];
  }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_shape(const Field& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Field&, const Field&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> data_;
};

/// Intensity image with every value in [0, 1].
class Image {
 public:
  Image() = default;
  Image(std::size_t width, std::size_t height, double fill = 0.0)
      : field_(width, height, fill) {
    check_range();
  }
  Image(std::size_t width, std::size_t height, std::vector<double> data)
      : field_(width, height, std::move(data)) {
    check_range();
  }
  explicit Image(Field field) : field_(std::move(field)) { check_range(); }

  /// Clamps every value into [0, 1]; NaN becomes 0.
  static Image clamped(Field field) {
    for (double& v : field.values()) {
      v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
    }
    Image img;
    img.field_ = std::move(field);
    return img;
  }

  std::size_t width() const { return field_.width(); }
  std::size_t height() const { return field_.height(); }
  std::size_t size() const { return field_.size(); }

  double operator()(std::size_t x, std::size_t y) const { return field_(x, y); }
  double operator[](std::size_t i) const { return field_[i]; }
  std::span<const double> values() const { return field_.values(); }

  const Field& field() const { return field_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  void check_range() const {
    for (std::size_t i = 0; i < field_.size(); ++i) {
      const double v = field_[i];
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::domain_error("Image: intensity " + std::to_string(v) +
                                " at index " + std::to_string(i) +
                                " outside [0,1]");
      }
    }
  }

  Field field_;
};

/// Boolean pixel set; true marks a stored (known) pixel.
class Mask {
 public:
  Mask() = default;
  Mask(std::size_t width, std::size_t height, bool fill = false)
      : width_(width), height_(height), bits_(width * height, fill ? 1 : 0) {}

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return bits_.size(); }

  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  bool operator()(std::size_t x, std::size_t y) const {
    return bits_[y * width_ + x] != 0;
  }
  void set(std::size_t i, bool value = true) { bits_[i] = value ? 1 : 0; }

  std::size_t count() const {
    return static_cast<std::size_t>(
        std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }
  double density() const {
    return bits_.empty() ? 0.0
                         : static_cast<double>(count()) /
                               static_cast<double>(bits_.size());
  }

  /// Row-major indices of the set pixels.
  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i]) out.push_back(i);
    }
    return out;
  }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct GridGeometry {
  std::size_t width = 0;
  std::size_t height = 0;
  double h_spacing = 0.0;

  /// Unit-square convention: h = 1 / max(width, height).
  static GridGeometry unit_square(std::size_t width, std::size_t height) {
    if (width == 0 || height == 0) {
      throw DimensionError("GridGeometry: zero dimension");
    }
    return {width, height,
            1.0 / static_cast<double>(std::max(width, height))};
  }
  template <typename Grid>
  static GridGeometry for_grid(const Grid& g) {
    return unit_square(g.width(), g.height());
  }

  std::size_t size() const { return width * height; }
};

namespace detail {

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionError(std::string(what) + ": dimension mismatch " +
                         std::to_string(a.width()) + "x" +
                         std::to_string(a.height()) + " vs " +
                         std::to_string(b.width()) + "x" +
                         std::to_string(b.height()));
  }
}

template <typename Grid>
void require_geometry(const Grid& g, const GridGeometry& geom,
                      const char* what) {
  if (g.width() != geom.width || g.height() != geom.height) {
    throw DimensionError(std::string(what) +
                         ": grid does not match geometry");
  }
}

/// Sum of the four mirrored neighbours minus 4 * center, unscaled.
/// Writes into out[y * w + x] for rows [y0, y1).
inline void stencil_rows(std::span<const double> f, std::size_t w,
                         std::size_t h, std::size_t y0, std::size_t y1,
                         std::span<double> out) {
  for (std::size_t y = y0; y < y1; ++y) {
    const double* row = f.data() + y * w;
    const double* up = y > 0 ? row - w : row;
    const double* down = y + 1 < h ? row + w : row;
    double* o = out.data() + y * w;
    for (std::size_t x = 0; x < w; ++x) {
      const double c = row[x];
      const double west = x > 0 ? row[x - 1] : c;
      const double east = x + 1 < w ? row[x + 1] : c;
      o[x] = west + east + up[x] + down[x] - 4.0 * c;
    }
  }
}

}  // namespace detail

/// Five-point Laplacian with mirrored (homogeneous Neumann) boundary.
inline Field laplacian(const Field& f, const GridGeometry& geom) {
  detail::require_geometry(f, geom, "laplacian");
  Field out(f.width(), f.height());
  detail::stencil_rows(f.values(), f.width(), f.height(), 0, f.height(),
                       out.values());
  const double inv_h2 = 1.0 / (geom.h_spacing * geom.h_spacing);
  for (double& v : out.values()) v *= inv_h2;
  return out;
}

/// A(v) = v - alpha * laplacian(v).
inline Field apply_helmholtz(const Field& v, double alpha,
                             const GridGeometry& geom) {
  if (!(alpha >= 0.0)) throw std::domain_error("apply_helmholtz: alpha < 0");
  Field out = laplacian(v, geom);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = v[i] - alpha * out[i];
  }
  return out;
}

}  // namespace topoinpaint

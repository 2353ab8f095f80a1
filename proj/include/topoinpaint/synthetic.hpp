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

// Built-in test images, sampled at cell centres of the unit square.

#include <algorithm>
#include <cmath>
#include <functional>

#include "topoinpaint/grid.hpp"

namespace topoinpaint::synthetic {

inline Image sample(std::size_t n, const std::function<double(double, double)>& fn) {
  Field f(n, n);
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      f(x, y) = fn((x + 0.5) / n, (y + 0.5) / n);
    }
  }
  return Image::clamped(std::move(f));
}

inline Image smooth_bump(std::size_t n) {
  return sample(n, [](double x, double y) {
    const double r2 = (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5);
    return 0.2 + 0.6 * std::exp(-r2 / 0.05);
  });
}

inline Image step_edge(std::size_t n) {
  return sample(n, [](double x, double) { return x < 0.5 ? 0.2 : 0.8; });
}

/// smooth_bump with one pixel forced to white, off the bump's centre.
inline Image bump_with_outlier(std::size_t n) {
  Field f = smooth_bump(n).field();
  f(n * 5 / 8, n * 5 / 16) = 1.0;
  return Image(std::move(f));
}

/// Bilinear ramp, a raised disc and a darker band: smooth regions
/// separated by jumps.
inline Image piecewise_smooth(std::size_t n) {
  return sample(n, [](double x, double y) {
    double v = 0.3 + 0.4 * x * y;
    if ((x - 0.35) * (x - 0.35) + (y - 0.4) * (y - 0.4) < 0.06) v += 0.35;
    if (y > 0.75) v -= 0.2;
    return v;
  });
}

}  // namespace topoinpaint::synthetic

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

// Criterion field + pixel budget -> mask. Every selector returns exactly
// Budget::target_count pixels. Ties are always broken toward the smaller
// row-major index.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "topoinpaint/criterion.hpp"
#include "topoinpaint/grid.hpp"

namespace topoinpaint {

class Budget {
 public:
  explicit Budget(double fraction) : fraction_(fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
      throw std::invalid_argument("Budget: fraction must lie in (0,1], got " +
                                  std::to_string(fraction));
    }
  }

  double fraction() const { return fraction_; }

  /// round(fraction * n), kept within [1, n].
  std::size_t target_count(std::size_t n) const {
    const auto k = static_cast<std::size_t>(std::llround(fraction_ * static_cast<double>(n)));
    return std::clamp<std::size_t>(k, std::min<std::size_t>(1, n), n);
  }

 private:
  double fraction_;
};

inline double mask_density(const Mask& mask) { return mask.density(); }

namespace detail {

/// Indices ordered by descending value, ascending index on ties.
inline std::vector<std::size_t> descending_order(const Field& s) {
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  return order;
}

inline void require_finite(const Field& s, const char* what) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i])) {
      throw std::domain_error(std::string(what) + ": non-finite criterion at index " +
                              std::to_string(i));
    }
  }
}

}  // namespace detail

/// Keeps the target_count pixels with the largest criterion values.
inline Mask select_threshold(const CriterionField& s, const Budget& budget) {
  const Field& v = s.values;
  detail::require_finite(v, "select_threshold");
  const std::size_t k = budget.target_count(v.size());
  const auto order = detail::descending_order(v);
  Mask mask(v.width(), v.height());
  for (std::size_t i = 0; i < k; ++i) mask.set(order[i]);
  return mask;
}

namespace detail {

/// Affine normalization to [0,1] followed by a clamped rescale whose mean
/// matches `fraction`.
inline std::vector<double> density_map(const Field& s, double fraction) {
  const auto [lo_it, hi_it] = std::minmax_element(s.values().begin(), s.values().end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const std::size_t n = s.size();
  std::vector<double> base(n, 1.0);
  if (hi > lo) {
    for (std::size_t i = 0; i < n; ++i) base[i] = (s[i] - lo) / (hi - lo);
  }
  const auto mean_of = [](const std::vector<double>& d) {
    return std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
  };
  double scale = fraction / mean_of(base);
  std::vector<double> density(n);
  for (int round = 0; round < 50; ++round) {
    for (std::size_t i = 0; i < n; ++i) density[i] = std::min(1.0, scale * base[i]);
    const double mean = mean_of(density);
    if (std::abs(mean - fraction) <= 1e-6) break;
    scale *= fraction / mean;
  }
  return density;
}

/// Floyd-Steinberg with a serpentine scan; a pixel is set when its
/// accumulated density reaches 1/2. At the image border the weights of the
/// missing neighbours are redistributed over the present ones, so no error
/// leaves the image and the count lands on round(sum of densities).
inline Mask error_diffusion(std::vector<double> d, std::size_t w, std::size_t h) {
  Mask mask(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    const bool forward = y % 2 == 0;
    for (std::size_t step = 0; step < w; ++step) {
      const std::size_t x = forward ? step : w - 1 - step;
      const std::size_t i = y * w + x;
      const double out = d[i] >= 0.5 ? 1.0 : 0.0;
      if (out > 0.0) mask.set(i);
      const bool has_ahead = forward ? x + 1 < w : x > 0;
      const bool has_behind = forward ? x > 0 : x + 1 < w;
      const bool has_below = y + 1 < h;
      const double w_ahead = has_ahead ? 7.0 : 0.0;
      const double w_behind = has_below && has_behind ? 3.0 : 0.0;
      const double w_below = has_below ? 5.0 : 0.0;
      const double w_diag = has_below && has_ahead ? 1.0 : 0.0;
      const double total = w_ahead + w_behind + w_below + w_diag;
      if (total == 0.0) continue;
      const double err = (d[i] - out) / total;
      const std::size_t ahead = forward ? x + 1 : x - 1;
      const std::size_t behind = forward ? x - 1 : x + 1;
      if (has_ahead) d[y * w + ahead] += err * w_ahead;
      if (has_below) {
        const std::size_t next = (y + 1) * w;
        if (has_behind) d[next + behind] += err * w_behind;
        d[next + x] += err * w_below;
        if (has_ahead) d[next + ahead] += err * w_diag;
      }
    }
  }
  return mask;
}

/// Drops the weakest selected or adds the strongest unselected pixels
/// until exactly k are set.
inline void enforce_count(Mask& mask, const Field& s, std::size_t k) {
  std::size_t count = mask.count();
  if (count == k) return;
  const auto order = descending_order(s);
  if (count > k) {
    // Drop from the bottom of the threshold ranking.
    for (auto it = order.rbegin(); count > k; ++it) {
      if (mask[*it]) {
        mask.set(*it, false);
        --count;
      }
    }
  } else {
    for (std::size_t j = 0; count < k; ++j) {
      if (!mask[order[j]]) {
        mask.set(order[j]);
        ++count;
      }
    }
  }
}

}  // namespace detail

/// Error-diffusion halftoning of the normalized criterion, then exact
/// budget correction.
inline Mask select_halftone(const CriterionField& s, const Budget& budget) {
  const Field& v = s.values;
  detail::require_finite(v, "select_halftone");
  const std::size_t k = budget.target_count(v.size());
  Mask mask = detail::error_diffusion(detail::density_map(v, budget.fraction()),
                                      v.width(), v.height());
  detail::enforce_count(mask, v, k);
  return mask;
}

}  // namespace topoinpaint

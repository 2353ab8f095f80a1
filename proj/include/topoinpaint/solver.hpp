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

// Matrix-free solvers for  r*v - alpha*lap(v) = rhs  on the pixel grid,
// with homogeneous Neumann conditions on the image border and optional
// Dirichlet data on a mask. Mask unknowns are eliminated, so the system on
// the free pixels stays symmetric positive definite and is solved with
// Jacobi-preconditioned conjugate gradients.
//
// Dot products are accumulated in fixed 1024-element blocks and the block
// sums are added in order, so results never depend on thread layout.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "topoinpaint/grid.hpp"

namespace topoinpaint {

struct SolveParams {
  double alpha = 1.0;     // diffusion weight (length^2 on the unit square)
  double rel_tol = 1e-8;  // target ||A v - b|| / ||b||
  int max_iter = 0;       // 0 selects 10 * max(width, height)

  void validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
      throw std::invalid_argument("SolveParams: alpha must be finite and >= 0");
    }
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
      throw std::invalid_argument("SolveParams: rel_tol must lie in (0,1)");
    }
    if (max_iter < 0) throw std::invalid_argument("SolveParams: max_iter < 0");
  }

  int iteration_cap(const GridGeometry& geom) const {
    return max_iter > 0 ? max_iter
                        : static_cast<int>(10 * std::max(geom.width, geom.height));
  }

  SolveParams with_alpha(double a) const {
    SolveParams p = *this;
    p.alpha = a;
    return p;
  }
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;  // true residual, recomputed at exit
};

class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

namespace detail {

inline constexpr std::size_t kDotBlock = 1024;

inline double blocked_dot(std::span<const double> a, std::span<const double> b) {
  double total = 0.0;
  for (std::size_t start = 0; start < a.size(); start += kDotBlock) {
    const std::size_t end = std::min(a.size(), start + kDotBlock);
    double partial = 0.0;
    for (std::size_t i = start; i < end; ++i) partial += a[i] * b[i];
    total += partial;
  }
  return total;
}

inline double norm2(std::span<const double> a) { return std::sqrt(blocked_dot(a, a)); }

/// reaction * v - alpha * lap(v), restricted to the pixels where
/// `fixed` is false (fixed entries of the output are zeroed).
struct StencilOperator {
  double alpha;
  double reaction;
  GridGeometry geom;
  const Mask* fixed = nullptr;

  double diffusion() const { return alpha / (geom.h_spacing * geom.h_spacing); }

  void apply(std::span<const double> x, std::span<double> y) const {
    stencil_rows(x, geom.width, geom.height, 0, geom.height, y);
    const double k = diffusion();
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = reaction * x[i] - k * y[i];
    if (fixed != nullptr) {
      for (std::size_t i = 0; i < y.size(); ++i) {
        if ((*fixed)[i]) y[i] = 0.0;
      }
    }
  }

  std::vector<double> diagonal() const {
    std::vector<double> d(geom.size());
    const double k = diffusion();
    for (std::size_t y = 0; y < geom.height; ++y) {
      for (std::size_t x = 0; x < geom.width; ++x) {
        const int neighbours = (x > 0) + (x + 1 < geom.width) + (y > 0) +
                               (y + 1 < geom.height);
        d[y * geom.width + x] = reaction + k * neighbours;
      }
    }
    return d;
  }
};

/// Solves op(x) = b on the free pixels; b must vanish on fixed pixels. The
/// stopping test is ||b - op(x)|| <= rel_tol * ref_norm.
inline std::vector<double> conjugate_gradient(const StencilOperator& op,
                                              std::span<const double> b,
                                              double ref_norm,
                                              const SolveParams& params,
                                              SolveStats* stats) {
  const std::size_t n = b.size();
  std::vector<double> x(n, 0.0);
  const double b_norm = ref_norm;
  if (stats != nullptr) *stats = {};
  if (norm2(b) == 0.0 || b_norm == 0.0) return x;

  const double target = params.rel_tol * b_norm;
  const int cap = params.iteration_cap(op.geom);

  std::vector<double> inv_diag = op.diagonal();
  for (std::size_t i = 0; i < n; ++i) {
    const bool is_fixed = op.fixed != nullptr && (*op.fixed)[i];
    inv_diag[i] = (is_fixed || inv_diag[i] == 0.0) ? 0.0 : 1.0 / inv_diag[i];
  }

  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n), p(n), q(n);
  int iter = 0;
  double true_res = norm2(b);
  // Outer loop restarts from the true residual when recursive and true
  // residuals drift apart.
  while (iter < cap) {
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = blocked_dot(r, z);
    double r_norm = norm2(r);
    while (iter < cap && r_norm > 0.5 * target) {
      op.apply(p, q);
      const double pq = blocked_dot(p, q);
      if (!(pq > 0.0)) break;
      const double step = rz / pq;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += step * p[i];
        r[i] -= step * q[i];
      }
      ++iter;
      r_norm = norm2(r);
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
      const double rz_next = blocked_dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    op.apply(x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    true_res = norm2(r);
    if (true_res <= target) break;
    if (r_norm > 0.5 * target) break;  // stalled or out of iterations
  }
  if (stats != nullptr) {
    stats->iterations = iter;
    stats->relative_residual = true_res / b_norm;
  }
  if (!(true_res <= target)) {
    throw SolveError("conjugate gradient did not converge: relative residual " +
                         std::to_string(true_res / b_norm) + " after " +
                         std::to_string(iter) + " iterations",
                     true_res / b_norm, iter);
  }
  return x;
}

inline Field solve_with_mask(const Field& rhs, const Mask* mask,
                             const Field* dirichlet, double alpha,
                             double reaction, const SolveParams& params,
                             const GridGeometry& geom, SolveStats* stats) {
  params.validate();
  require_geometry(rhs, geom, "solve");
  StencilOperator op{alpha, reaction, geom, mask};

  std::vector<double> lifted(rhs.size(), 0.0);
  double fill = 0.0;
  if (mask != nullptr) {
    require_geometry(*mask, geom, "solve (mask)");
    require_geometry(*dirichlet, geom, "solve (dirichlet)");
    std::size_t fixed = 0;
    for (std::size_t i = 0; i < lifted.size(); ++i) {
      if ((*mask)[i]) {
        lifted[i] = (*dirichlet)[i];
        fill += lifted[i];
        ++fixed;
      }
    }
    if (fixed > 0) fill /= static_cast<double>(fixed);
  }

  // Reduced right-hand side rhs - A * lifted on the free pixels, first with
  // zero on the free pixels (the reference for the residual contract), then
  // with the free pixels started at the mean of the Dirichlet data, which
  // makes constant data an exact solution.
  StencilOperator full{alpha, reaction, geom, nullptr};
  std::vector<double> b(rhs.size());
  const auto reduce = [&] {
    full.apply(lifted, b);
    for (std::size_t i = 0; i < b.size(); ++i) {
      const bool is_fixed = mask != nullptr && (*mask)[i];
      b[i] = is_fixed ? 0.0 : rhs[i] - b[i];
    }
  };
  reduce();
  const double ref_norm = norm2(b);
  if (ref_norm == 0.0) {
    if (stats != nullptr) *stats = {};
    return Field(geom.width, geom.height, std::move(lifted));
  }
  if (fill != 0.0) {
    for (std::size_t i = 0; i < lifted.size(); ++i) {
      if (!(*mask)[i]) lifted[i] = fill;
    }
    reduce();
  }

  std::vector<double> x = conjugate_gradient(op, b, ref_norm, params, stats);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += lifted[i];
  return Field(geom.width, geom.height, std::move(x));
}

}  // namespace detail

/// Solves -alpha*lap(v) + v = h with homogeneous Neumann conditions.
inline Field solve_neumann(const Field& h, const SolveParams& params,
                           const GridGeometry& geom, SolveStats* stats = nullptr) {
  return detail::solve_with_mask(h, nullptr, nullptr, params.alpha, 1.0, params,
                                 geom, stats);
}

/// Solves -alpha*lap(u) + u = rhs off the mask with u = dirichlet on it.
inline Field solve_masked(const Field& rhs, const Mask& mask,
                          const Field& dirichlet, const SolveParams& params,
                          const GridGeometry& geom, SolveStats* stats = nullptr) {
  return detail::solve_with_mask(rhs, &mask, &dirichlet, params.alpha, 1.0,
                                 params, geom, stats);
}

/// Pure Laplace inpainting: -lap(u) = rhs off the mask, u = dirichlet on it.
/// params.alpha is ignored. The mask must be nonempty.
inline Field solve_masked_laplace(const Field& rhs, const Mask& mask,
                                  const Field& dirichlet, const SolveParams& params,
                                  const GridGeometry& geom,
                                  SolveStats* stats = nullptr) {
  if (mask.count() == 0) {
    throw std::invalid_argument("solve_masked_laplace: empty mask leaves the system singular");
  }
  return detail::solve_with_mask(rhs, &mask, &dirichlet, 1.0, 0.0, params, geom,
                                 stats);
}

}  // namespace topoinpaint

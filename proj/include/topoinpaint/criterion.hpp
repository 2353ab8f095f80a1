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

// Pixel-selection criteria for linear diffusion inpainting.
//
// Writing the reconstruction as u = f + v, the residual v solves
//
//     -alpha lap(v) + v = alpha lap(f)   in D \ K,   v = 0 on K,
//
// and the cost is J(K) = sum_x g(v(x)). The adjoint state w solves
//
//     -alpha lap(w) + w = -g'(v)         in D \ K,   w = 0 on K.
//
// Adding a small disc around x0 to K changes J by a positive multiple of
// v(x0) w(x0) to first order, so the keep-score -v w ranks the pixels whose
// insertion lowers the cost the most. The multiple (1 / E(1), see
// bessel.hpp) is positive and is not applied here.

#include <cmath>
#include <stdexcept>
#include <string>

#include "topoinpaint/grid.hpp"
#include "topoinpaint/solver.hpp"

namespace topoinpaint {

enum class CostKind { L2, L1Regularized };

/// The pointwise cost g. L2: s^2/2. L1Regularized: sqrt(s^2 + eps), a C^1
/// stand-in for |s|.
struct CostMode {
  CostKind kind = CostKind::L2;
  double epsilon_reg = 1e-4;

  static CostMode l2() { return {CostKind::L2, 0.0}; }
  static CostMode l1(double eps = 1e-4) {
    if (!(eps > 0.0)) throw std::invalid_argument("CostMode: epsilon_reg must be > 0");
    return {CostKind::L1Regularized, eps};
  }

  /// Lipschitz constant of g_s.
  double lipschitz() const {
    return kind == CostKind::L2 ? 1.0 : 1.0 / std::sqrt(epsilon_reg);
  }

  /// Exponent of the matching Lp error metric.
  int p() const { return kind == CostKind::L2 ? 2 : 1; }
};

inline double g_value(double s, const CostMode& mode) {
  return mode.kind == CostKind::L2 ? 0.5 * s * s
                                   : std::sqrt(s * s + mode.epsilon_reg);
}

inline double g_s(double s, const CostMode& mode) {
  return mode.kind == CostKind::L2 ? s : s / std::sqrt(s * s + mode.epsilon_reg);
}

enum class CriterionKind { Adjoint, H1 };

struct CriterionField {
  Field values;
  CriterionKind kind = CriterionKind::Adjoint;
};

/// v0 = A^{-1}(alpha lap f) on the whole grid.
inline Field primal_state(const Image& f_noisy, const SolveParams& params,
                          const GridGeometry& geom) {
  Field h = laplacian(f_noisy.field(), geom);
  for (double& v : h.values()) v *= params.alpha;
  return solve_neumann(h, params, geom);
}

/// w0 = A^{-1}(-g_s(v0)) on the whole grid.
inline Field adjoint_state(const Field& v0, const CostMode& mode,
                           const SolveParams& params, const GridGeometry& geom) {
  Field src(v0.width(), v0.height());
  for (std::size_t i = 0; i < src.size(); ++i) src[i] = -g_s(v0[i], mode);
  return solve_neumann(src, params, geom);
}

/// Primal state of the inpainting problem with mask K (v = 0 on K). With
/// an empty mask this is primal_state.
inline Field primal_state_masked(const Image& f, const Mask& mask,
                                 const SolveParams& params,
                                 const GridGeometry& geom) {
  Field h = laplacian(f.field(), geom);
  for (double& v : h.values()) v *= params.alpha;
  return solve_masked(h, mask, Field(geom.width, geom.height), params, geom);
}

inline Field adjoint_state_masked(const Field& v, const Mask& mask,
                                  const CostMode& mode, const SolveParams& params,
                                  const GridGeometry& geom) {
  Field src(v.width(), v.height());
  for (std::size_t i = 0; i < src.size(); ++i) src[i] = -g_s(v[i], mode);
  return solve_masked(src, mask, Field(geom.width, geom.height), params, geom);
}

/// Keep-score -v0 * w0; larger means more important to store.
inline CriterionField adj_criterion(const Field& v0, const Field& w0) {
  detail::require_same_shape(v0, w0, "adj_criterion");
  Field out(v0.width(), v0.height());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -v0[i] * w0[i];
  return {std::move(out), CriterionKind::Adjoint};
}

/// |lap f| pointwise.
inline CriterionField h1_criterion(const Image& f_noisy, const GridGeometry& geom) {
  Field out = laplacian(f_noisy.field(), geom);
  for (double& v : out.values()) v = std::abs(v);
  return {std::move(out), CriterionKind::H1};
}

/// Convenience: primal, adjoint and keep-score in one call.
inline CriterionField adjoint_keep_score(const Image& f, const CostMode& mode,
                                         const SolveParams& params,
                                         const GridGeometry& geom) {
  const Field v0 = primal_state(f, params, geom);
  const Field w0 = adjoint_state(v0, mode, params, geom);
  return adj_criterion(v0, w0);
}

}  // namespace topoinpaint

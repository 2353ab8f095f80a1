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

#include "topoinpaint/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"

namespace topoinpaint {
namespace {

using testing::random_field;
using testing::random_mask_bits;

double residual_ratio(const Field& v, const Field& h, double alpha, const GridGeometry& g) {
  const Field av = apply_helmholtz(v, alpha, g);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    num += (av[i] - h[i]) * (av[i] - h[i]);
    den += h[i] * h[i];
  }
  return std::sqrt(num / den);
}

TEST(SolveParams, Validation) {
  SolveParams p;
  EXPECT_NO_THROW(p.validate());
  p.rel_tol = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = SolveParams{};
  p.alpha = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = SolveParams{};
  EXPECT_EQ(p.iteration_cap(GridGeometry::unit_square(30, 40)), 400);
}

TEST(SolveNeumann, ConstantAndZeroRightHandSides) {
  const auto g = GridGeometry::unit_square(9, 6);
  const Field v = solve_neumann(Field(9, 6, 0.42), SolveParams{}, g);
  for (double x : v.values()) EXPECT_NEAR(x, 0.42, 1e-12);
  const Field z = solve_neumann(Field(9, 6), SolveParams{}, g);
  for (double x : z.values()) EXPECT_EQ(x, 0.0);
}

TEST(SolveNeumann, ResidualContract) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t w = 10 + 3 * seed, h = 40 - 2 * seed;
    const auto g = GridGeometry::unit_square(w, h);
    const Field rhs = random_field(w, h, seed);
    for (double alpha : {0.01, 1.0, 5.5}) {
      SolveStats stats;
      const Field v = solve_neumann(rhs, SolveParams{alpha, 1e-8, 0}, g, &stats);
      EXPECT_LE(stats.relative_residual, 1e-8);
      EXPECT_LE(residual_ratio(v, rhs, alpha, g), 1e-8);
    }
  }
}

TEST(SolveNeumann, ManufacturedSolutionConverges) {
  const double alpha = 1.0;
  std::vector<double> errors;
  for (std::size_t n : {32, 64, 128}) {
    const auto g = GridGeometry::unit_square(n, n);
    Field exact(n, n), rhs(n, n);
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t x = 0; x < n; ++x) {
        const double px = (x + 0.5) * g.h_spacing, py = (y + 0.5) * g.h_spacing;
        exact(x, y) = std::cos(std::numbers::pi * px) * std::cos(std::numbers::pi * py);
        rhs(x, y) = (1.0 + 2.0 * alpha * std::numbers::pi * std::numbers::pi) * exact(x, y);
      }
    }
    const Field v = solve_neumann(rhs, SolveParams{alpha, 1e-12, 0}, g);
    double err = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) err = std::max(err, std::abs(v[i] - exact[i]));
    errors.push_back(err);
  }
  for (std::size_t i = 1; i < errors.size(); ++i) {
    const double order = std::log2(errors[i - 1] / errors[i]);
    EXPECT_GE(order, 1.8);
    EXPECT_LE(order, 2.2);
  }
}

TEST(SolveNeumann, ConvergenceFailureCarriesResidual) {
  const auto g = GridGeometry::unit_square(32, 32);
  try {
    solve_neumann(random_field(32, 32, 3), SolveParams{5.0, 1e-12, 2}, g);
    FAIL() << "expected SolveError";
  } catch (const SolveError& e) {
    EXPECT_GT(e.residual(), 1e-12);
    EXPECT_EQ(e.iterations(), 2);
  }
}

TEST(SolveNeumann, Deterministic) {
  const auto g = GridGeometry::unit_square(50, 50);
  const Field rhs = random_field(50, 50, 9);
  EXPECT_EQ(solve_neumann(rhs, SolveParams{}, g), solve_neumann(rhs, SolveParams{}, g));
}

TEST(SolveMasked, FullMaskReturnsDirichlet) {
  const auto g = GridGeometry::unit_square(6, 5);
  const Field d = random_field(6, 5, 1);
  EXPECT_EQ(solve_masked(random_field(6, 5, 2), Mask(6, 5, true), d, SolveParams{}, g), d);
}

TEST(SolveMasked, EmptyMaskMatchesNeumann) {
  const auto g = GridGeometry::unit_square(12, 8);
  const Field rhs = random_field(12, 8, 4);
  const Field a = solve_masked(rhs, Mask(12, 8), Field(12, 8), SolveParams{}, g);
  const Field b = solve_neumann(rhs, SolveParams{}, g);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(SolveMasked, ConstantsAreFixed) {
  const auto g = GridGeometry::unit_square(16, 16);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Mask m = random_mask_bits(16, 16, 0.1, seed);
    const Field u =
        solve_masked(Field(16, 16, 0.3), m, Field(16, 16, 0.3), SolveParams{1.0, 1e-12, 0}, g);
    for (double v : u.values()) EXPECT_NEAR(v, 0.3, 1e-9);
  }
}

TEST(SolveMasked, DirichletExactAndFreeResidual) {
  const auto g = GridGeometry::unit_square(20, 14);
  const Mask m = random_mask_bits(20, 14, 0.2, 11);
  const Field d = random_field(20, 14, 12);
  const Field rhs = random_field(20, 14, 13);
  const Field u = solve_masked(rhs, m, d, SolveParams{0.7, 1e-8, 0}, g);
  const Field au = apply_helmholtz(u, 0.7, g);
  // Reference: the reduced right-hand side with the mask data folded in.
  Field lift(20, 14);
  for (std::size_t i = 0; i < u.size(); ++i) lift[i] = m[i] ? d[i] : 0.0;
  const Field al = apply_helmholtz(lift, 0.7, g);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (m[i]) {
      EXPECT_EQ(u[i], d[i]);
    } else {
      num += (au[i] - rhs[i]) * (au[i] - rhs[i]);
      den += (rhs[i] - al[i]) * (rhs[i] - al[i]);
    }
  }
  EXPECT_LE(std::sqrt(num / den), 1e-8);
}

TEST(SolveMasked, MaximumPrinciple) {
  const auto g = GridGeometry::unit_square(24, 24);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Mask m = random_mask_bits(24, 24, 0.05 + 0.02 * seed, seed);
    const double lo = seed % 2 == 0 ? 0.2 : -0.6;
    const double hi = lo + 0.5;
    const Field d = random_field(24, 24, 100 + seed, lo, hi);
    double m_min = hi, m_max = lo;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (m[i]) {
        m_min = std::min(m_min, d[i]);
        m_max = std::max(m_max, d[i]);
      }
    }
    const Field u = solve_masked(Field(24, 24), m, d, SolveParams{0.5, 1e-12, 0}, g);
    for (double v : u.values()) {
      EXPECT_GE(v, std::min(0.0, m_min) - 1e-9);
      EXPECT_LE(v, std::max(0.0, m_max) + 1e-9);
    }
  }
}

TEST(SolveMaskedLaplace, HarmonicRamp) {
  Mask m(5, 1);
  m.set(0);
  m.set(4);
  Field d(5, 1);
  d[4] = 1.0;
  const Field u = solve_masked_laplace(Field(5, 1), m, d, SolveParams{1.0, 1e-12, 0},
                                       GridGeometry::unit_square(5, 1));
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(u[i], 0.25 * i, 1e-12);
  EXPECT_THROW(solve_masked_laplace(Field(5, 1), Mask(5, 1), d, SolveParams{},
                                    GridGeometry::unit_square(5, 1)),
               std::invalid_argument);
}

}  // namespace
}  // namespace topoinpaint

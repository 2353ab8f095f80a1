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

#include "topoinpaint/grid.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

namespace topoinpaint {
namespace {

using testing::abs_sum;
using testing::inner;
using testing::random_field;

const GridGeometry kUnitStep5{5, 5, 1.0};

TEST(GridGeometry, UnitSquareSpacing) {
  for (auto [w, h] : {std::pair<std::size_t, std::size_t>{32, 32}, {64, 17}, {3, 200}}) {
    const auto g = GridGeometry::unit_square(w, h);
    EXPECT_GT(g.h_spacing, 0.0);
    EXPECT_NEAR(g.h_spacing * std::max(w, h), 1.0, 1e-15);
  }
  EXPECT_THROW(GridGeometry::unit_square(0, 4), DimensionError);
}

TEST(Image, RejectsOutOfRangeIntensity) {
  EXPECT_THROW(Image(2, 1, std::vector<double>{0.5, 1.5}), std::domain_error);
  EXPECT_THROW(Image(1, 1, std::vector<double>{std::nan("")}), std::domain_error);
  EXPECT_THROW(Field(2, 2, std::vector<double>{1.0}), DimensionError);
  const Image c = Image::clamped(Field(2, 1, std::vector<double>{-0.2, 3.0}));
  EXPECT_EQ(c[0], 0.0);
  EXPECT_EQ(c[1], 1.0);
}

TEST(Laplacian, ConstantFieldIsAnnihilated) {
  const Field c(7, 4, 0.37);
  const Field lap = laplacian(c, GridGeometry::unit_square(7, 4));
  for (double v : lap.values()) EXPECT_EQ(v, 0.0);
}

TEST(Laplacian, ImpulseStencil) {
  Field f(5, 5);
  f(2, 2) = 1.0;
  const Field lap = laplacian(f, kUnitStep5);
  for (std::size_t y = 0; y < 5; ++y) {
    for (std::size_t x = 0; x < 5; ++x) {
      const int d = std::abs(static_cast<int>(x) - 2) + std::abs(static_cast<int>(y) - 2);
      const double expected = d == 0 ? -4.0 : (d == 1 ? 1.0 : 0.0);
      EXPECT_EQ(lap(x, y), expected) << x << "," << y;
    }
  }
}

TEST(Laplacian, RampWithFaceMirror) {
  // ghost(-1) = f(0) and ghost(4) = f(3): ends see one real neighbour.
  const Field ramp(4, 1, std::vector<double>{0, 1, 2, 3});
  const Field lap = laplacian(ramp, GridGeometry{4, 1, 1.0});
  EXPECT_EQ(lap[0], 1.0);
  EXPECT_EQ(lap[1], 0.0);
  EXPECT_EQ(lap[2], 0.0);
  EXPECT_EQ(lap[3], -1.0);
}

TEST(Laplacian, ScalesWithSpacing) {
  Field f(5, 5);
  f(2, 2) = 1.0;
  const Field lap = laplacian(f, GridGeometry::unit_square(5, 5));
  EXPECT_DOUBLE_EQ(lap(2, 2), -4.0 * 25.0);
}

TEST(Laplacian, DimensionMismatchThrows) {
  EXPECT_THROW(laplacian(Field(4, 4), GridGeometry::unit_square(4, 5)), DimensionError);
  EXPECT_THROW(apply_helmholtz(Field(4, 4), 1.0, GridGeometry::unit_square(3, 4)),
               DimensionError);
}

TEST(Laplacian, Linear) {
  const auto geom = GridGeometry::unit_square(13, 9);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Field f = random_field(13, 9, seed);
    const Field g = random_field(13, 9, seed + 1000);
    const double a = 0.3 + seed, b = -1.7;
    Field combo(13, 9);
    for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = a * f[i] + b * g[i];
    const Field lhs = laplacian(combo, geom);
    const Field lf = laplacian(f, geom), lg = laplacian(g, geom);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      EXPECT_NEAR(lhs[i], a * lf[i] + b * lg[i], 1e-12 * (std::abs(lhs[i]) + 1e3));
    }
  }
}

TEST(Laplacian, DiscreteDivergenceTheorem) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t w = 1 + seed % 23, h = 1 + (seed * 7) % 19;
    const Field f = random_field(w, h, seed);
    const Field lap = laplacian(f, GridGeometry::unit_square(w, h));
    double sum = 0.0;
    for (double v : lap.values()) sum += v;
    EXPECT_LE(std::abs(sum), 1e-10 * std::max(abs_sum(lap), 1e-300)) << w << "x" << h;
  }
}

TEST(Helmholtz, ConstantIsFixedPoint) {
  const Field c(6, 6, -2.5);
  for (double alpha : {0.0, 0.1, 7.0}) {
    const Field out = apply_helmholtz(c, alpha, GridGeometry::unit_square(6, 6));
    for (double v : out.values()) EXPECT_DOUBLE_EQ(v, -2.5);
  }
}

TEST(Helmholtz, ZeroAlphaIsIdentity) {
  const Field f = random_field(8, 5, 3);
  EXPECT_EQ(apply_helmholtz(f, 0.0, GridGeometry::unit_square(8, 5)), f);
}

TEST(Helmholtz, ImpulseResponse) {
  Field f(5, 5);
  f(2, 2) = 1.0;
  const Field out = apply_helmholtz(f, 1.0, kUnitStep5);
  EXPECT_EQ(out(2, 2), 5.0);
  EXPECT_EQ(out(1, 2), -1.0);
  EXPECT_EQ(out(3, 2), -1.0);
  EXPECT_EQ(out(2, 1), -1.0);
  EXPECT_EQ(out(2, 3), -1.0);
  EXPECT_EQ(out(0, 0), 0.0);
}

TEST(Helmholtz, NegativeAlphaRejected) {
  EXPECT_THROW(apply_helmholtz(Field(2, 2), -1.0, GridGeometry::unit_square(2, 2)),
               std::domain_error);
}

TEST(Helmholtz, SymmetricAndCoercive) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t w = 2 + seed % 17, h = 2 + (seed * 5) % 13;
    const auto geom = GridGeometry::unit_square(w, h);
    const double alpha = 0.01 * (1 + seed % 50);
    const Field u = random_field(w, h, seed);
    const Field v = random_field(w, h, seed + 555);
    const Field av = apply_helmholtz(v, alpha, geom);
    const Field au = apply_helmholtz(u, alpha, geom);
    const double uav = inner(u, av);
    const double vau = inner(v, au);
    // Relative to the magnitude of the summed terms, which cannot cancel.
    double scale = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) scale += std::abs(u[i] * av[i]);
    EXPECT_LE(std::abs(uav - vau), 1e-10 * scale);
    EXPECT_GE(inner(v, apply_helmholtz(v, alpha, geom)), inner(v, v));
  }
}

}  // namespace
}  // namespace topoinpaint

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

// Modified Bessel functions K0, K1 and the radial fundamental solution
//
//     E(r) = K0(r / sqrt(alpha)) / (2 pi)
//
// of -alpha lap + I in the plane.
//
// bessel_k picks one of three branches:
//   z <= 2        power series (cancellation costs at most one digit here)
//   2 < z < 20    Steed's continued fraction for K1/K0 with Temme's
//                 normalization sum
//   z >= 20       Hankel asymptotic expansion, truncated at its smallest
//                 term (relative error below e^{-2z} < 1e-17)
// The switch points came out of a sweep against the quadrature route below:
// a series/asymptotic pair alone cannot reach 1e-10 anywhere in 5 < z < 12.
//
// bessel_k_quadrature is an independent route through the integral
// representation K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt, used as
// an oracle.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "topoinpaint/grid.hpp"

namespace topoinpaint {

inline constexpr double kSeriesSwitch = 2.0;
inline constexpr double kAsymptoticSwitch = 20.0;

struct BesselEval {
  double z = 0.0;
  double k0 = 0.0;
  double k1 = 0.0;
};

namespace detail {

inline BesselEval bessel_series(double z) {
  constexpr double gamma = std::numbers::egamma;
  const double t = 0.25 * z * z;
  double term0 = 1.0;  // t^k / (k!)^2
  double term1 = 1.0;  // t^k / (k! (k+1)!)
  double harmonic = 0.0;
  double i0 = 1.0;
  double k0_sum = 0.0;
  double i1_sum = 1.0;
  double k1_sum = -2.0 * gamma + 1.0;  // psi(1) + psi(2)
  for (int k = 1; k < 200; ++k) {
    term0 *= t / (static_cast<double>(k) * k);
    term1 *= t / (static_cast<double>(k) * (k + 1));
    harmonic += 1.0 / k;
    i0 += term0;
    k0_sum += term0 * harmonic;
    i1_sum += term1;
    k1_sum += term1 * (-2.0 * gamma + 2.0 * harmonic + 1.0 / (k + 1));
    if (term0 < 1e-18 * i0 && term1 < 1e-18 * i1_sum) break;
  }
  const double log_half = std::log(0.5 * z);
  const double k0 = -(log_half + gamma) * i0 + k0_sum;
  const double i1 = 0.5 * z * i1_sum;
  const double k1 = 1.0 / z + i1 * log_half - 0.25 * z * k1_sum;
  return {z, k0, k1};
}

inline BesselEval bessel_continued_fraction(double z) {
  constexpr double a1 = 0.25;  // 1/4 - nu^2 with nu = 0
  double b = 2.0 * (1.0 + z);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i < 10000; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double q_next = (q1 - b * q2) / a;
    q1 = q2;
    q2 = q_next;
    q += c * q_next;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < 1e-17) break;
  }
  h *= a1;
  const double k0 = std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z) / s;
  const double k1 = k0 * (z + 0.5 - h) / z;
  return {z, k0, k1};
}

/// sum_k a_k(nu) / z^k, stopped at the smallest term.
inline double hankel_sum(double nu, double z) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double next = term * (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * z);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

inline BesselEval bessel_asymptotic(double z) {
  const double lead = std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z);
  return {z, lead * hankel_sum(0.0, z), lead * hankel_sum(1.0, z)};
}

}  // namespace detail

inline BesselEval bessel_k(double z) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw std::domain_error("bessel_k: z must be finite and > 0, got " + std::to_string(z));
  }
  if (z <= kSeriesSwitch) return detail::bessel_series(z);
  if (z < kAsymptoticSwitch) return detail::bessel_continued_fraction(z);
  return detail::bessel_asymptotic(z);
}

/// Trapezoidal rule on the integral representation. The integrand is
/// analytic in the strip |Im t| < pi/2, so the error decays like
/// exp(-pi^2 / step).
inline double bessel_k_quadrature(int nu, double z, double step = 0.02) {
  if (!(z > 0.0)) throw std::domain_error("bessel_k_quadrature: z must be > 0");
  double sum = 0.5 * std::exp(-z);
  for (int j = 1;; ++j) {
    const double t = j * step;
    const double term = std::exp(-z * std::cosh(t)) * std::cosh(nu * t);
    sum += term;
    if (term < 1e-300 || term < 1e-20 * sum) break;
  }
  return sum * step;
}

/// E(r) = K0(r / sqrt(alpha)) / (2 pi).
inline double fundamental_solution(double r, double alpha) {
  if (!(r > 0.0) || !(alpha > 0.0)) {
    throw std::domain_error("fundamental_solution: need r > 0 and alpha > 0");
  }
  return bessel_k(r / std::sqrt(alpha)).k0 / (2.0 * std::numbers::pi);
}

/// Positive factor 1/E(1) = 2 pi / K0(alpha^{-1/2}) relating the cost
/// variation to v0(x0) w0(x0).
inline double expansion_constant(double alpha) { return 1.0 / fundamental_solution(1.0, alpha); }

struct FundamentalResidual {
  std::size_t n = 0;
  double h = 0.0;
  double max_residual = 0.0;
};

/// Samples E centred in an n x n unit-square grid, applies the discrete
/// Helmholtz operator and reports the largest |residual| over the annulus
/// r_inner <= r <= r_outer.
inline FundamentalResidual fundamental_solution_residual(double alpha, std::size_t n,
                                                         double r_inner = 0.1,
                                                         double r_outer = 0.4) {
  const auto geom = GridGeometry::unit_square(n, n);
  Field e(n, n);
  const auto radius = [&](std::size_t x, std::size_t y) {
    const double px = (x + 0.5) * geom.h_spacing - 0.5;
    const double py = (y + 0.5) * geom.h_spacing - 0.5;
    return std::hypot(px, py);
  };
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      const double r = radius(x, y);
      // Cells too close to the pole never reach the annulus stencil.
      e(x, y) = r > 0.5 * r_inner ? fundamental_solution(r, alpha) : 0.0;
    }
  }
  const Field res = apply_helmholtz(e, alpha, geom);
  FundamentalResidual out{n, geom.h_spacing, 0.0};
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      const double r = radius(x, y);
      if (r >= r_inner && r <= r_outer) out.max_residual = std::max(out.max_residual, std::abs(res(x, y)));
    }
  }
  return out;
}

struct BesselSweep {
  double max_rel_error_k0 = 0.0;
  double max_rel_error_k1 = 0.0;
  bool positive_decreasing = true;
  bool k1_exceeds_k0 = true;
  double switch_jump = 0.0;  // worst relative jump across a branch switch
};

/// Compares bessel_k with the quadrature route on a log grid of `points`
/// values in [z_min, z_max].
inline BesselSweep bessel_sweep(std::size_t points = 200, double z_min = 1e-3,
                                double z_max = 50.0) {
  BesselSweep sweep;
  BesselEval prev{};
  for (std::size_t i = 0; i < points; ++i) {
    const double z = z_min * std::pow(z_max / z_min, static_cast<double>(i) / (points - 1));
    const auto b = bessel_k(z);
    sweep.max_rel_error_k0 = std::max(
        sweep.max_rel_error_k0, std::abs(b.k0 / bessel_k_quadrature(0, z) - 1.0));
    sweep.max_rel_error_k1 = std::max(
        sweep.max_rel_error_k1, std::abs(b.k1 / bessel_k_quadrature(1, z) - 1.0));
    if (!(b.k0 > 0.0 && b.k1 > 0.0)) sweep.positive_decreasing = false;
    if (i > 0 && !(b.k0 < prev.k0 && b.k1 < prev.k1)) sweep.positive_decreasing = false;
    if (!(b.k1 > b.k0)) sweep.k1_exceeds_k0 = false;
    prev = b;
  }
  for (double s : {kSeriesSwitch, kAsymptoticSwitch}) {
    const auto left = bessel_k(std::nextafter(s, 0.0));
    const auto right = bessel_k(std::nextafter(s, 100.0));
    const auto at = bessel_k(s);
    for (const auto& side : {left, right}) {
      sweep.switch_jump = std::max(sweep.switch_jump, std::abs(side.k0 / at.k0 - 1.0));
      sweep.switch_jump = std::max(sweep.switch_jump, std::abs(side.k1 / at.k1 - 1.0));
    }
  }
  return sweep;
}

}  // namespace topoinpaint

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

// Brute-force check of the keep-score. For a base mask K and a candidate
// pixel x0 the oracle runs two full reconstructions and returns
//
//     dJ(x0) = J(K + {x0}) - J(K),    J(K) = sum_x g(u_K(x) - f(x)).
//
// The keep-score predicts the ordering of -dJ over the free pixels. With a
// nonempty K it is evaluated from the states of the inpainting problem on
// D \ K (v = w = 0 on K), the same base configuration the oracle perturbs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "topoinpaint/codec.hpp"
#include "topoinpaint/criterion.hpp"
#include "topoinpaint/experiment.hpp"
#include "topoinpaint/grid.hpp"
#include "topoinpaint/parallel.hpp"
#include "topoinpaint/solver.hpp"

namespace topoinpaint {

/// Reconstruction the oracle perturbs. SourceImage is u - alpha lap u = f off
/// K (the inpainting model whose expansion gives the keep-score); the rest
/// reuse the decoder's right-hand sides with unquantized data.
enum class OracleRhs { SourceImage, HomogeneousZero, NNExtend, Harmonic };

inline OracleRhs oracle_rhs(ReconRhsMode m) {
  switch (m) {
    case ReconRhsMode::HomogeneousZero: return OracleRhs::HomogeneousZero;
    case ReconRhsMode::NNExtend: return OracleRhs::NNExtend;
    case ReconRhsMode::Harmonic: return OracleRhs::Harmonic;
  }
  return OracleRhs::SourceImage;
}

inline Field oracle_reconstruction(const Image& f, const Mask& mask, OracleRhs rhs,
                                   const SolveParams& params) {
  const auto geom = GridGeometry::for_grid(f);
  switch (rhs) {
    case OracleRhs::SourceImage:
      return solve_masked(f.field(), mask, f.field(), params, geom);
    case OracleRhs::HomogeneousZero:
      return reconstruct(mask, f.field(), ReconRhsMode::HomogeneousZero, params);
    case OracleRhs::NNExtend:
      return reconstruct(mask, f.field(), ReconRhsMode::NNExtend, params);
    case OracleRhs::Harmonic:
      return reconstruct(mask, f.field(), ReconRhsMode::Harmonic, params);
  }
  throw std::invalid_argument("oracle_reconstruction: unknown mode");
}

inline double reconstruction_cost(const Image& f, const Field& u, const CostMode& mode) {
  double j = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) j += g_value(u[i] - f[i], mode);
  return j;
}

/// Exact cost variations against one base mask; the base cost is computed
/// once. Each query is independent of query order.
class CostOracle {
 public:
  CostOracle(Image f, Mask base, CostMode mode, double alpha, OracleRhs rhs,
             SolveParams params)
      : f_(std::move(f)),
        base_(std::move(base)),
        mode_(mode),
        rhs_(rhs),
        params_(params.with_alpha(alpha)) {
    detail::require_same_shape(f_, base_, "CostOracle");
    base_cost_ = reconstruction_cost(f_, oracle_reconstruction(f_, base_, rhs_, params_), mode_);
  }

  double base_cost() const { return base_cost_; }
  const Mask& base() const { return base_; }

  double delta_j(std::size_t pixel) const {
    if (pixel >= base_.size()) throw std::out_of_range("CostOracle: pixel index out of range");
    if (base_[pixel]) throw std::invalid_argument("CostOracle: pixel already in the mask");
    Mask grown = base_;
    grown.set(pixel);
    return reconstruction_cost(f_, oracle_reconstruction(f_, grown, rhs_, params_), mode_) -
           base_cost_;
  }

 private:
  Image f_;
  Mask base_;
  CostMode mode_;
  OracleRhs rhs_;
  SolveParams params_;
  double base_cost_ = 0.0;
};

inline double brute_force_delta_j(const Image& f, const Mask& mask, std::size_t x0,
                                  const CostMode& mode, double alpha, OracleRhs rhs,
                                  const SolveParams& params) {
  return CostOracle(f, mask, mode, alpha, rhs, params).delta_j(x0);
}

/// -v w from the states on D \ K; equals adj_criterion(primal_state,
/// adjoint_state) when the mask is empty.
inline Field keep_score(const Image& f, const Mask& mask, const CostMode& mode, double alpha,
                        const SolveParams& params) {
  const auto geom = GridGeometry::for_grid(f);
  const auto p = params.with_alpha(alpha);
  const Field v = primal_state_masked(f, mask, p, geom);
  const Field w = adjoint_state_masked(v, mask, mode, p, geom);
  return adj_criterion(v, w).values;
}

/// Free pixel with the largest keep-score (smallest index on ties).
inline std::size_t best_keep_pixel(const Field& scores, const Mask& mask) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (mask[i]) continue;
    if (!best || scores[i] > scores[*best]) best = i;
  }
  if (!best) throw std::invalid_argument("best_keep_pixel: mask covers every pixel");
  return *best;
}

/// One pixel drawn uniformly from each of `count` equal-size quantile
/// strata of the free pixels' scores.
inline std::vector<std::size_t> stratified_sample(const Field& scores, const Mask& mask,
                                                  std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!mask[i]) free.push_back(i);
  }
  if (count > free.size()) throw std::invalid_argument("stratified_sample: not enough free pixels");
  std::stable_sort(free.begin(), free.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  NoiseRng rng(seed);
  std::vector<std::size_t> sample;
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t lo = s * free.size() / count;
    const std::size_t hi = (s + 1) * free.size() / count;
    const auto pick = lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo));
    sample.push_back(free[std::min(pick, hi - 1)]);
  }
  std::sort(sample.begin(), sample.end());
  return sample;
}

/// Uniformly random mask with round(fraction * N) pixels.
inline Mask random_mask(std::size_t width, std::size_t height, double fraction,
                        std::uint64_t seed) {
  const std::size_t n = width * height;
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  NoiseRng rng(seed);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - i));
    std::swap(idx[i], idx[std::min(j, n - 1)]);
  }
  Mask m(width, height);
  for (std::size_t i = 0; i < k; ++i) m.set(idx[i]);
  return m;
}

struct OracleReport {
  std::vector<std::size_t> sample;
  std::vector<double> delta_j;      // oracle, per sample pixel
  std::vector<double> keep_scores;  // criterion, per sample pixel
  bool degenerate = false;          // all oracle values or all scores tied
  double spearman = 0.0;            // meaningful only when !degenerate
  double top_k_overlap = 0.0;
  std::size_t k = 0;
};

namespace detail {

/// 1-based ranks, ties share their average rank.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

inline std::optional<double> pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

/// Positions of the k largest values, smaller position first on ties.
inline std::vector<std::size_t> top_k(const std::vector<double>& v, std::size_t k) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] > v[b]; });
  order.resize(std::min(k, order.size()));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace detail

/// Spearman correlation between -dJ and the keep-scores plus the overlap of
/// their top-k sets, k = |sample| / 5.
inline OracleReport compare_rankings(std::vector<std::size_t> sample,
                                     std::vector<double> delta_j,
                                     std::vector<double> keep_scores) {
  if (delta_j.size() != keep_scores.size() || sample.size() != delta_j.size()) {
    throw std::invalid_argument("compare_rankings: length mismatch");
  }
  if (sample.size() < 2) throw std::invalid_argument("compare_rankings: need >= 2 samples");
  OracleReport rep;
  rep.sample = std::move(sample);
  rep.delta_j = std::move(delta_j);
  rep.keep_scores = std::move(keep_scores);
  std::vector<double> gain(rep.delta_j.size());
  for (std::size_t i = 0; i < gain.size(); ++i) gain[i] = -rep.delta_j[i];
  const auto rho = detail::pearson(detail::average_ranks(gain),
                                   detail::average_ranks(rep.keep_scores));
  rep.k = std::max<std::size_t>(1, rep.sample.size() / 5);
  if (!rho) {
    rep.degenerate = true;
    return rep;
  }
  rep.spearman = *rho;
  const auto a = detail::top_k(gain, rep.k);
  const auto b = detail::top_k(rep.keep_scores, rep.k);
  std::vector<std::size_t> both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
  rep.top_k_overlap = static_cast<double>(both.size()) / static_cast<double>(rep.k);
  return rep;
}

/// Oracle dJ over `sample` (free pixels, at least 10) compared with the
/// keep-score computed on the same base mask.
inline OracleReport rank_agreement(const Image& f, const Mask& mask, const CostMode& mode,
                                   double alpha, OracleRhs rhs, const SolveParams& params,
                                   const std::vector<std::size_t>& sample,
                                   unsigned threads = 1) {
  if (sample.size() < 10) throw std::invalid_argument("rank_agreement: need >= 10 sample pixels");
  for (auto p : sample) {
    if (p >= mask.size() || mask[p]) {
      throw std::invalid_argument("rank_agreement: sample pixel " + std::to_string(p) +
                                  " is not a free pixel");
    }
  }
  const Field scores = keep_score(f, mask, mode, alpha, params);
  const CostOracle oracle(f, mask, mode, alpha, rhs, params);
  std::vector<double> dj(sample.size());
  parallel_for(sample.size(), threads, [&](std::size_t i) { dj[i] = oracle.delta_j(sample[i]); });
  std::vector<double> ks;
  for (auto p : sample) ks.push_back(scores[p]);
  return compare_rankings(sample, std::move(dj), std::move(ks));
}

struct RankingStudyConfig {
  double seed_fraction = 0.05;
  double alpha = 0.5;
  CostMode mode = CostMode::l2();
  OracleRhs rhs = OracleRhs::SourceImage;
  std::size_t samples = 50;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct RankingStudy {
  OracleReport report;
  std::size_t best_pixel = 0;
  double best_delta_j = 0.0;  // oracle dJ at the top keep-score pixel
};

/// Random seed mask, stratified sample, rank agreement and the sign check
/// at the pixel with the largest keep-score.
inline RankingStudy ranking_study(const Image& f, const SolveParams& params,
                                  const RankingStudyConfig& cfg) {
  const Mask base = random_mask(f.width(), f.height(), cfg.seed_fraction, cfg.seed);
  const Field scores = keep_score(f, base, cfg.mode, cfg.alpha, params);
  const auto sample = stratified_sample(scores, base, cfg.samples, cfg.seed);
  RankingStudy out;
  out.report = rank_agreement(f, base, cfg.mode, cfg.alpha, cfg.rhs, params, sample, cfg.threads);
  out.best_pixel = best_keep_pixel(scores, base);
  out.best_delta_j =
      CostOracle(f, base, cfg.mode, cfg.alpha, cfg.rhs, params).delta_j(out.best_pixel);
  return out;
}

}  // namespace topoinpaint

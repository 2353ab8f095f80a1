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

// Sparse-pixel image codec.
//
// PIC1 byte layout (all integers little-endian):
//
//   offset  size  field
//   0       4     magic "PIC1"
//   4       1     version (1)
//   5       1     method tag   (0 adj-t, 1 adj-h, 2 h1-t, 3 h1-h)
//   6       1     rhs mode     (0 homogeneous-zero, 1 nn-extend, 2 harmonic)
//   7       4     width
//   11      4     height
//   15      8     alpha (IEEE-754 binary64)
//   23      ceil(N/8)   mask bits, row-major, MSB first, no row padding
//   ...     popcount    8-bit stored values in row-major mask order

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "topoinpaint/criterion.hpp"
#include "topoinpaint/grid.hpp"
#include "topoinpaint/netpbm.hpp"
#include "topoinpaint/select.hpp"
#include "topoinpaint/solver.hpp"

namespace topoinpaint {

enum class MethodTag : std::uint8_t { AdjT = 0, AdjH = 1, H1T = 2, H1H = 3 };
enum class ReconRhsMode : std::uint8_t { HomogeneousZero = 0, NNExtend = 1, Harmonic = 2 };

inline constexpr std::uint8_t kPicVersion = 1;
inline constexpr std::size_t kPicHeaderSize = 23;

inline std::string_view to_string(MethodTag m) {
  switch (m) {
    case MethodTag::AdjT: return "adj-t";
    case MethodTag::AdjH: return "adj-h";
    case MethodTag::H1T: return "h1-t";
    case MethodTag::H1H: return "h1-h";
  }
  return "?";
}

inline std::string_view to_string(ReconRhsMode m) {
  switch (m) {
    case ReconRhsMode::HomogeneousZero: return "zero";
    case ReconRhsMode::NNExtend: return "nn-extend";
    case ReconRhsMode::Harmonic: return "harmonic";
  }
  return "?";
}

inline std::optional<MethodTag> parse_method(std::string_view s) {
  for (auto m : {MethodTag::AdjT, MethodTag::AdjH, MethodTag::H1T, MethodTag::H1H}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

inline std::optional<ReconRhsMode> parse_rhs_mode(std::string_view s) {
  for (auto m : {ReconRhsMode::HomogeneousZero, ReconRhsMode::NNExtend,
                 ReconRhsMode::Harmonic}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

inline bool is_adjoint(MethodTag m) { return m == MethodTag::AdjT || m == MethodTag::AdjH; }
inline bool is_halftone(MethodTag m) { return m == MethodTag::AdjH || m == MethodTag::H1H; }

struct CompressedImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  double alpha_recon = 1.0;
  MethodTag method = MethodTag::AdjH;
  ReconRhsMode rhs_mode = ReconRhsMode::HomogeneousZero;
  Mask mask;
  std::vector<std::uint8_t> values;  // one per mask pixel, row-major

  friend bool operator==(const CompressedImage& a, const CompressedImage& b) {
    // alpha compared bitwise so NaN payloads and -0.0 survive round trips.
    return a.width == b.width && a.height == b.height &&
           std::bit_cast<std::uint64_t>(a.alpha_recon) ==
               std::bit_cast<std::uint64_t>(b.alpha_recon) &&
           a.method == b.method && a.rhs_mode == b.rhs_mode && a.mask == b.mask &&
           a.values == b.values;
  }
};

class DecodeError : public std::runtime_error {
 public:
  enum class Kind { BadMagic, VersionMismatch, LengthMismatch, BadField };
  DecodeError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class ReconstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Criterion used by a method: keep-score for adj-*, |lap f| for h1-*.
inline CriterionField method_criterion(const Image& f, MethodTag method,
                                       const CostMode& mode, double alpha,
                                       const SolveParams& params) {
  const auto geom = GridGeometry::for_grid(f);
  if (is_adjoint(method)) return adjoint_keep_score(f, mode, params.with_alpha(alpha), geom);
  return h1_criterion(f, geom);
}

inline Mask method_mask(const CriterionField& c, MethodTag method, const Budget& budget) {
  return is_halftone(method) ? select_halftone(c, budget) : select_threshold(c, budget);
}

inline CompressedImage make_compressed(const Image& f, Mask mask, MethodTag method,
                                       double alpha,
                                       ReconRhsMode rhs_mode) {
  CompressedImage c;
  c.width = static_cast<std::uint32_t>(f.width());
  c.height = static_cast<std::uint32_t>(f.height());
  c.alpha_recon = alpha;
  c.method = method;
  c.rhs_mode = rhs_mode;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (mask[i]) c.values.push_back(static_cast<std::uint8_t>(quantize(f[i], 255)));
  }
  c.mask = std::move(mask);
  return c;
}

/// Selects a mask on f_input and stores its 8-bit samples. alpha_select is
/// used both for the criterion and as the decoder's alpha.
inline CompressedImage compress(const Image& f_input, MethodTag method,
                                const CostMode& mode, const Budget& budget,
                                double alpha_select, const SolveParams& params,
                                ReconRhsMode rhs_mode = ReconRhsMode::HomogeneousZero,
                                CriterionField* criterion_out = nullptr) {
  if (!(alpha_select > 0.0)) throw std::invalid_argument("compress: alpha must be > 0");
  CriterionField crit = method_criterion(f_input, method, mode, alpha_select, params);
  Mask mask = method_mask(crit, method, budget);
  if (criterion_out != nullptr) *criterion_out = std::move(crit);
  return make_compressed(f_input, std::move(mask), method, alpha_select, rhs_mode);
}

namespace detail {

/// Stored value of the nearest mask pixel (Euclidean; ties go to the
/// smaller row-major index).
inline Field nearest_extension(const Mask& mask, const Field& stored) {
  const std::size_t w = mask.width();
  const std::size_t h = mask.height();
  const auto sites = mask.indices();
  Field out(w, h);
  if (sites.empty()) return out;
  const auto better = [](long long d2, std::size_t idx, long long best_d2,
                         std::size_t best_idx) {
    return d2 < best_d2 || (d2 == best_d2 && idx < best_idx);
  };
  if (sites.size() <= 64) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        long long best_d2 = -1;
        std::size_t best = 0;
        for (std::size_t s : sites) {
          const long long dx = static_cast<long long>(s % w) - static_cast<long long>(x);
          const long long dy = static_cast<long long>(s / w) - static_cast<long long>(y);
          const long long d2 = dx * dx + dy * dy;
          if (best_d2 < 0 || better(d2, s, best_d2, best)) {
            best_d2 = d2;
            best = s;
          }
        }
        out(x, y) = stored[best];
      }
    }
    return out;
  }
  const long long W = static_cast<long long>(w);
  const long long H = static_cast<long long>(h);
  for (long long y = 0; y < H; ++y) {
    for (long long x = 0; x < W; ++x) {
      long long best_d2 = -1;
      std::size_t best = 0;
      // Rings of growing Chebyshev radius r; every pixel on ring r is at
      // squared distance >= r^2, so stop once r^2 exceeds the best found.
      for (long long r = 0; best_d2 < 0 || r * r <= best_d2; ++r) {
        if (r > W && r > H) break;
        for (long long dy = -r; dy <= r; ++dy) {
          const long long yy = y + dy;
          if (yy < 0 || yy >= H) continue;
          const bool edge_row = dy == -r || dy == r;
          for (long long dx = -r; dx <= r; dx += edge_row ? 1 : 2 * r) {
            const long long xx = x + dx;
            if (xx >= 0 && xx < W) {
              const auto idx = static_cast<std::size_t>(yy * W + xx);
              if (mask[idx]) {
                const long long d2 = dx * dx + dy * dy;
                if (best_d2 < 0 || better(d2, idx, best_d2, best)) {
                  best_d2 = d2;
                  best = idx;
                }
              }
            }
            if (r == 0) break;
          }
        }
      }
      out(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = stored[best];
    }
  }
  return out;
}

}  // namespace detail

/// Inpaints from Dirichlet data on the mask. Shared by the decoder and by
/// the brute-force oracle, which feeds unquantized values.
inline Field reconstruct(const Mask& mask, const Field& dirichlet, ReconRhsMode rhs_mode,
                         const SolveParams& params) {
  if (mask.count() == 0) throw ReconstructionError("empty mask: nothing to interpolate from");
  const auto geom = GridGeometry::for_grid(mask);
  switch (rhs_mode) {
    case ReconRhsMode::HomogeneousZero:
      return solve_masked(Field(geom.width, geom.height), mask, dirichlet, params, geom);
    case ReconRhsMode::NNExtend:
      return solve_masked(detail::nearest_extension(mask, dirichlet), mask, dirichlet,
                          params, geom);
    case ReconRhsMode::Harmonic:
      return solve_masked_laplace(Field(geom.width, geom.height), mask, dirichlet, params,
                                  geom);
  }
  throw std::invalid_argument("reconstruct: unknown rhs mode");
}

/// Reconstructs with the embedded alpha and rhs mode; output clamped to [0,1].
inline Image decompress(const CompressedImage& c, const SolveParams& params) {
  if (c.mask.width() != c.width || c.mask.height() != c.height) {
    throw std::invalid_argument("decompress: mask does not match header dimensions");
  }
  if (c.values.size() != c.mask.count()) {
    throw std::invalid_argument("decompress: value count does not match mask");
  }
  if (c.rhs_mode != ReconRhsMode::Harmonic && !(c.alpha_recon > 0.0)) {
    throw std::invalid_argument("decompress: alpha must be > 0");
  }
  Field dirichlet(c.width, c.height);
  std::size_t k = 0;
  for (std::size_t i = 0; i < dirichlet.size(); ++i) {
    if (c.mask[i]) dirichlet[i] = c.values[k++] / 255.0;
  }
  Field u = reconstruct(c.mask, dirichlet, c.rhs_mode, params.with_alpha(c.alpha_recon));
  return Image::clamped(std::move(u));
}

namespace detail {

inline void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
  return v;
}

}  // namespace detail

inline Bytes encode_bytes(const CompressedImage& c) {
  if (c.mask.width() != c.width || c.mask.height() != c.height ||
      c.values.size() != c.mask.count()) {
    throw std::invalid_argument("encode_bytes: inconsistent CompressedImage");
  }
  Bytes out = {'P', 'I', 'C', '1', kPicVersion, static_cast<std::uint8_t>(c.method),
               static_cast<std::uint8_t>(c.rhs_mode)};
  detail::put_u32(out, c.width);
  detail::put_u32(out, c.height);
  const auto bits = std::bit_cast<std::uint64_t>(c.alpha_recon);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  const std::size_t n = c.mask.size();
  const std::size_t mask_start = out.size();
  out.resize(mask_start + (n + 7) / 8, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (c.mask[i]) out[mask_start + i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  out.insert(out.end(), c.values.begin(), c.values.end());
  return out;
}

inline CompressedImage decode_bytes(std::span<const std::uint8_t> in) {
  using K = DecodeError::Kind;
  if (in.size() < 4 || std::memcmp(in.data(), "PIC1", 4) != 0) {
    throw DecodeError(K::BadMagic, "not a PIC1 stream (bad magic)");
  }
  if (in.size() < kPicHeaderSize) {
    throw DecodeError(K::LengthMismatch, "truncated PIC1 header: " +
                                             std::to_string(in.size()) + " bytes");
  }
  if (in[4] != kPicVersion) {
    throw DecodeError(K::VersionMismatch,
                      "unsupported PIC1 version " + std::to_string(in[4]));
  }
  if (in[5] > 3) throw DecodeError(K::BadField, "unknown method tag " + std::to_string(in[5]));
  if (in[6] > 2) throw DecodeError(K::BadField, "unknown rhs mode " + std::to_string(in[6]));

  CompressedImage c;
  c.method = static_cast<MethodTag>(in[5]);
  c.rhs_mode = static_cast<ReconRhsMode>(in[6]);
  c.width = detail::get_u32(in, 7);
  c.height = detail::get_u32(in, 11);
  if (c.width == 0 || c.height == 0) throw DecodeError(K::BadField, "zero image dimension");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(in[15 + i]) << (8 * i);
  c.alpha_recon = std::bit_cast<double>(bits);

  const std::uint64_t n = static_cast<std::uint64_t>(c.width) * c.height;
  const std::uint64_t mask_bytes = (n + 7) / 8;
  if (in.size() - kPicHeaderSize < mask_bytes) {
    throw DecodeError(K::LengthMismatch, "truncated PIC1 mask: need " +
                                             std::to_string(mask_bytes) + " bytes");
  }
  c.mask = Mask(c.width, c.height);
  for (std::size_t i = 0; i < n; ++i) {
    if (in[kPicHeaderSize + i / 8] & (0x80u >> (i % 8))) c.mask.set(i);
  }
  // Padding bits past N must be zero for the encoding to be canonical.
  for (std::size_t i = n; i < mask_bytes * 8; ++i) {
    if (in[kPicHeaderSize + i / 8] & (0x80u >> (i % 8))) {
      throw DecodeError(K::BadField, "nonzero padding bits in PIC1 mask");
    }
  }
  const std::size_t count = c.mask.count();
  const std::size_t values_at = kPicHeaderSize + mask_bytes;
  if (in.size() - values_at != count) {
    throw DecodeError(K::LengthMismatch, "PIC1 value section holds " +
                                             std::to_string(in.size() - values_at) +
                                             " bytes, mask selects " +
                                             std::to_string(count));
  }
  c.values.assign(in.begin() + static_cast<std::ptrdiff_t>(values_at), in.end());
  return c;
}

}  // namespace topoinpaint

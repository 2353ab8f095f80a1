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

#include "topoinpaint/codec.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"

namespace topoinpaint {
namespace {

using testing::random_field;
using testing::random_image;
using testing::random_mask_bits;

const SolveParams kParams{1.0, 1e-10, 0};

CompressedImage random_compressed(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const std::size_t w = 1 + gen() % 40, h = 1 + gen() % 40;
  CompressedImage c;
  c.width = static_cast<std::uint32_t>(w);
  c.height = static_cast<std::uint32_t>(h);
  c.alpha_recon = std::ldexp(static_cast<double>(gen() % 100000 + 1), -12);
  c.method = static_cast<MethodTag>(gen() % 4);
  c.rhs_mode = static_cast<ReconRhsMode>(gen() % 3);
  c.mask = random_mask_bits(w, h, 0.15, seed + 1000);
  for (std::size_t i = 0; i < c.mask.count(); ++i) c.values.push_back(gen() & 0xFF);
  return c;
}

TEST(Names, RoundTrip) {
  for (auto m : {MethodTag::AdjT, MethodTag::AdjH, MethodTag::H1T, MethodTag::H1H}) {
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
  for (auto r : {ReconRhsMode::HomogeneousZero, ReconRhsMode::NNExtend, ReconRhsMode::Harmonic}) {
    EXPECT_EQ(parse_rhs_mode(to_string(r)), r);
  }
  EXPECT_FALSE(parse_method("adj"));
  EXPECT_FALSE(parse_rhs_mode("zeros"));
}

TEST(Pic1, RoundTripBitExact) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto c = random_compressed(seed);
    const Bytes bytes = encode_bytes(c);
    const std::size_t n = std::size_t{c.width} * c.height;
    EXPECT_EQ(bytes.size(), kPicHeaderSize + (n + 7) / 8 + c.mask.count());
    EXPECT_EQ(decode_bytes(bytes), c);
    EXPECT_EQ(encode_bytes(decode_bytes(bytes)), bytes);
  }
}

TEST(Pic1, HeaderLayout) {
  CompressedImage c;
  c.width = 3;
  c.height = 2;
  c.alpha_recon = 1.0;
  c.method = MethodTag::H1T;
  c.rhs_mode = ReconRhsMode::NNExtend;
  c.mask = Mask(3, 2);
  c.mask.set(0);
  c.mask.set(5);
  c.values = {7, 9};
  const Bytes b = encode_bytes(c);
  const Bytes expect = {'P', 'I', 'C', '1', 1, 2, 1, 3, 0, 0, 0, 2, 0, 0, 0,
                        0, 0, 0, 0, 0, 0, 0xF0, 0x3F, 0x84, 7, 9};
  EXPECT_EQ(b, expect);
}

DecodeError::Kind decode_kind(const Bytes& b) {
  try {
    decode_bytes(b);
  } catch (const DecodeError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "decode unexpectedly succeeded";
  return DecodeError::Kind::BadField;
}

TEST(Pic1, StructuredErrors) {
  const Bytes good = encode_bytes(random_compressed(3));
  Bytes bad = good;
  bad[0] = 'X';
  EXPECT_EQ(decode_kind(bad), DecodeError::Kind::BadMagic);
  bad = good;
  bad[4] = 2;
  EXPECT_EQ(decode_kind(bad), DecodeError::Kind::VersionMismatch);
  for (std::size_t cut : {std::size_t{10}, kPicHeaderSize + 1, good.size() - 1}) {
    EXPECT_EQ(decode_kind(Bytes(good.begin(), good.begin() + cut)),
              DecodeError::Kind::LengthMismatch);
  }
  bad = good;
  bad.push_back(0);
  EXPECT_EQ(decode_kind(bad), DecodeError::Kind::LengthMismatch);
  bad = good;
  bad[5] = 9;
  EXPECT_EQ(decode_kind(bad), DecodeError::Kind::BadField);
}

TEST(Pic1, EmptyMaskDecodesButCannotReconstruct) {
  CompressedImage c;
  c.width = 4;
  c.height = 3;
  c.mask = Mask(4, 3);
  const auto back = decode_bytes(encode_bytes(c));
  EXPECT_EQ(back.mask.count(), 0u);
  EXPECT_THROW(decompress(back, kParams), ReconstructionError);
}

TEST(Compress, ConstantImageStoresItsQuantization) {
  const Image f(16, 16, 0.3);
  for (auto m : {MethodTag::AdjT, MethodTag::AdjH, MethodTag::H1T, MethodTag::H1H}) {
    const auto c = compress(f, m, CostMode::l1(), Budget(0.1), 0.5, kParams);
    EXPECT_EQ(c.mask.count(), 26u);
    for (auto v : c.values) EXPECT_EQ(v, 77);
  }
}

TEST(Compress, H1KeepsImpulse) {
  Field f(9, 9, 0.2);
  f(3, 6) = 0.9;
  const auto c = compress(Image(f), MethodTag::H1T, CostMode::l2(), Budget(0.02), 1.0, kParams);
  EXPECT_TRUE(c.mask(3, 6));
}

TEST(Compress, AdjointDemotesCorruptedPixel) {
  const std::size_t n = 32;
  Field f(n, n);
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) f(x, y) = 0.2 + 0.5 * (x + 0.5) / n;
  }
  const std::size_t hot = 20 * n + 11;
  f[hot] = 1.0;
  CriterionField h1, adj;
  const auto ch = compress(Image(f), MethodTag::H1T, CostMode::l1(), Budget(0.05), 0.5, kParams,
                           ReconRhsMode::HomogeneousZero, &h1);
  compress(Image(f), MethodTag::AdjT, CostMode::l1(), Budget(0.05), 0.5, kParams,
           ReconRhsMode::HomogeneousZero, &adj);
  EXPECT_TRUE(ch.mask[hot]);
  const auto rank_of = [&](const Field& s) {
    std::size_t r = 0;
    for (double v : s.values()) r += v > s[hot];
    return r;
  };
  EXPECT_EQ(rank_of(h1.values), 0u);
  EXPECT_GT(rank_of(adj.values), 0u);
}

TEST(Decompress, FullMaskReturnsStoredValues) {
  const Image f = random_image(7, 5, 1);
  const auto c = compress(f, MethodTag::H1T, CostMode::l2(), Budget(1.0), 1.0, kParams);
  const Image u = decompress(c, kParams);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(u[i], c.values[i] / 255.0);
}

TEST(Decompress, ConstantDataReproducedInEveryMode) {
  for (auto r : {ReconRhsMode::NNExtend, ReconRhsMode::Harmonic}) {
    const Image f(20, 20, 0.5);
    const auto c = compress(f, MethodTag::AdjH, CostMode::l1(), Budget(0.1), 0.8, kParams, r);
    const Image u = decompress(c, kParams);
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(u[i], 128.0 / 255.0, 1e-9);
  }
}

TEST(Decompress, HarmonicRamp) {
  CompressedImage c;
  c.width = 5;
  c.height = 1;
  c.rhs_mode = ReconRhsMode::Harmonic;
  c.mask = Mask(5, 1);
  c.mask.set(0);
  c.mask.set(4);
  c.values = {0, 255};
  const Image u = decompress(c, kParams);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(u[i], 0.25 * i, 1e-12);
}

TEST(Decompress, IdempotentOnMask) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Image f = random_image(24, 18, seed);
    for (auto r : {ReconRhsMode::HomogeneousZero, ReconRhsMode::NNExtend, ReconRhsMode::Harmonic}) {
      const auto c = compress(f, MethodTag::AdjH, CostMode::l2(), Budget(0.1), 0.3, kParams, r);
      const Image u = decompress(c, kParams);
      std::size_t k = 0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (c.mask[i]) {
          EXPECT_EQ(u[i], c.values[k++] / 255.0);
        }
      }
    }
  }
}

TEST(Decompress, ConstantImageWithinQuantization) {
  for (double level : {0.0, 0.123, 0.5, 0.999, 1.0}) {
    const Image f(16, 12, level);
    for (auto m : {MethodTag::AdjT, MethodTag::AdjH, MethodTag::H1T, MethodTag::H1H}) {
      for (auto r : {ReconRhsMode::NNExtend, ReconRhsMode::Harmonic}) {
        const Image u = decompress(compress(f, m, CostMode::l1(), Budget(0.1), 1.0, kParams, r),
                                   kParams);
        for (std::size_t i = 0; i < u.size(); ++i) EXPECT_LE(std::abs(u[i] - level), 1.0 / 510 + 1e-15);
      }
    }
  }
}

TEST(NearestExtension, TiesPreferSmallerIndex) {
  Mask m(3, 1);
  m.set(0);
  m.set(2);
  const Field stored(3, 1, std::vector<double>{0.1, 0.0, 0.9});
  const Field e = detail::nearest_extension(m, stored);
  EXPECT_EQ(e[1], 0.1);
  EXPECT_EQ(e[2], 0.9);
}

TEST(NearestExtension, RingSearchMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Mask m = random_mask_bits(30, 25, 0.12, seed);
    const Field stored = random_field(30, 25, seed + 50);
    const Field e = detail::nearest_extension(m, stored);
    const auto sites = m.indices();
    ASSERT_GT(sites.size(), 64u);
    for (std::size_t i = 0; i < e.size(); ++i) {
      const long x = static_cast<long>(i % 30), y = static_cast<long>(i / 30);
      std::size_t best = sites[0];
      long best_d = -1;
      for (auto s : sites) {
        const long dx = static_cast<long>(s % 30) - x, dy = static_cast<long>(s / 30) - y;
        const long d = dx * dx + dy * dy;
        if (best_d < 0 || d < best_d) {
          best_d = d;
          best = s;
        }
      }
      EXPECT_EQ(e[i], stored[best]) << "pixel " << i;
    }
  }
}

}  // namespace
}  // namespace topoinpaint

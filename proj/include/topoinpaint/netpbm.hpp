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

// Netpbm readers and writers: PGM (P2 ascii, P5 binary) for images and
// PBM P4 (packed bits) for masks.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "topoinpaint/grid.hpp"

namespace topoinpaint {

using Bytes = std::vector<std::uint8_t>;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  Bytes data((std::istreambuf_iterator<char>(in)),
             std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for '" + path + "'");
  return data;
}

inline void write_file(const std::string& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

namespace detail {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    unsigned long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 0xFFFFFFFFul) throw ParseError(std::string(what) + " too large", start);
      ++pos_;
    }
    if (pos_ == start) {
      if (pos_ >= bytes_.size()) {
        throw ParseError(std::string("unexpected end of data reading ") + what, pos_);
      }
      throw ParseError(std::string("expected ") + what, pos_);
    }
    return value;
  }

  /// The single whitespace byte separating a binary header from the payload.
  void single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw ParseError("expected whitespace after header", pos_);
    }
    ++pos_;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

inline char read_magic(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw ParseError("bad netpbm magic", 0);
  return static_cast<char>(bytes[1]);
}

inline void check_dims(unsigned long w, unsigned long h, std::size_t offset) {
  if (w == 0 || h == 0) throw ParseError("zero image dimension", offset);
}

}  // namespace detail

/// Parses a P2 or P5 graymap and normalizes intensities by maxval.
inline Image load_pgm(std::span<const std::uint8_t> bytes) {
  const char kind = detail::read_magic(bytes);
  if (kind != '2' && kind != '5') throw ParseError("not a P2/P5 graymap", 0);
  detail::HeaderReader rd(bytes);
  rd.advance(2);
  const std::size_t dims_at = rd.pos();
  const auto w = rd.number("width");
  const auto h = rd.number("height");
  detail::check_dims(w, h, dims_at);
  const std::size_t maxval_at = rd.pos();
  const auto maxval = rd.number("maxval");
  if (maxval == 0 || maxval > 65535) throw ParseError("maxval out of range", maxval_at);

  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<double> data(n);
  const double scale = 1.0 / static_cast<double>(maxval);
  if (kind == '2') {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t at = rd.pos();
      const auto v = rd.number("pixel value");
      if (v > maxval) throw ParseError("pixel value exceeds maxval", at);
      data[i] = static_cast<double>(v) * scale;
    }
  } else {
    rd.single_space();
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    const std::size_t start = rd.pos();
    if (bytes.size() - start < n * bpp) {
      throw ParseError("truncated payload: need " + std::to_string(n * bpp) +
                           " bytes, have " + std::to_string(bytes.size() - start),
                       bytes.size());
    }
    for (std::size_t i = 0; i < n; ++i) {
      unsigned v = bytes[start + i * bpp];
      if (bpp == 2) v = (v << 8) | bytes[start + i * bpp + 1];
      if (v > maxval) throw ParseError("pixel value exceeds maxval", start + i * bpp);
      data[i] = static_cast<double>(v) * scale;
    }
  }
  return Image(w, h, std::move(data));
}

/// Round-half-up quantization of an intensity to [0, maxval].
inline unsigned quantize(double v, unsigned maxval) {
  const double q = std::floor(v * maxval + 0.5);
  return static_cast<unsigned>(std::clamp(q, 0.0, static_cast<double>(maxval)));
}

/// Writes a P5 graymap; 16-bit samples are big-endian when maxval > 255.
inline Bytes save_pgm(const Image& img, unsigned maxval = 255) {
  if (maxval < 1 || maxval > 65535) throw std::invalid_argument("save_pgm: maxval out of range");
  const std::string header = "P5\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n" +
                             std::to_string(maxval) + "\n";
  Bytes out(header.begin(), header.end());
  out.reserve(out.size() + img.size() * (maxval > 255 ? 2 : 1));
  for (double v : img.values()) {
    const unsigned q = quantize(v, maxval);
    if (maxval > 255) out.push_back(static_cast<std::uint8_t>(q >> 8));
    out.push_back(static_cast<std::uint8_t>(q & 0xFF));
  }
  return out;
}

/// PBM P4: 1 = black = stored pixel, rows padded to whole bytes, MSB first.
inline Bytes save_pbm(const Mask& mask) {
  const std::string header = "P4\n" + std::to_string(mask.width()) + " " +
                             std::to_string(mask.height()) + "\n";
  Bytes out(header.begin(), header.end());
  const std::size_t row_bytes = (mask.width() + 7) / 8;
  for (std::size_t y = 0; y < mask.height(); ++y) {
    Bytes row(row_bytes, 0);
    for (std::size_t x = 0; x < mask.width(); ++x) {
      if (mask(x, y)) row[x / 8] |= static_cast<std::uint8_t>(0x80u >> (x % 8));
    }
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

inline Mask load_pbm(std::span<const std::uint8_t> bytes) {
  if (detail::read_magic(bytes) != '4') throw ParseError("not a P4 bitmap", 0);
  detail::HeaderReader rd(bytes);
  rd.advance(2);
  const std::size_t dims_at = rd.pos();
  const auto w = rd.number("width");
  const auto h = rd.number("height");
  detail::check_dims(w, h, dims_at);
  rd.single_space();
  const std::size_t row_bytes = (w + 7) / 8;
  const std::size_t start = rd.pos();
  if (bytes.size() - start < row_bytes * h) {
    throw ParseError("truncated payload", bytes.size());
  }
  Mask mask(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (bytes[start + y * row_bytes + x / 8] & (0x80u >> (x % 8))) {
        mask.set(y * w + x);
      }
    }
  }
  return mask;
}

}  // namespace topoinpaint

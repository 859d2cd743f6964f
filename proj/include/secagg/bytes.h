/*
 * Copyright 2026 The secagg-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SECAGG_BYTES_H_
#define SECAGG_BYTES_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "secagg/errors.h"

namespace secagg {

// Append-only buffer for building wire payloads. Multi-byte integers are
// big-endian unless the method name says otherwise; FieldVector elements are
// the one little-endian case on the wire.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }

  void u16be(std::uint16_t v) {
    buf_.push_back(static_cast<std::uint8_t>(v >> 8));
    buf_.push_back(static_cast<std::uint8_t>(v));
  }

  void u32be(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) {
      buf_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
  }

  void u64be(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
      buf_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
  }

  void u64le(std::uint64_t v) {
    for (int shift = 0; shift <= 56; shift += 8) {
      buf_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
  }

  void f64(double v) { u64be(std::bit_cast<std::uint64_t>(v)); }

  void raw(std::span<const std::uint8_t> bytes) {
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
  }

  // 2-byte big-endian length prefix followed by the bytes.
  void var_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() > 0xffff) {
      throw ProtocolError("var_bytes payload exceeds 65535 bytes");
    }
    u16be(static_cast<std::uint16_t>(bytes.size()));
    raw(bytes);
  }

  std::vector<std::uint8_t> take() { return std::move(buf_); }
  std::size_t size() const { return buf_.size(); }

 private:
  std::vector<std::uint8_t> buf_;
};

// Cursor over a received payload. Every accessor throws ProtocolError on
// underflow; expect_end() rejects trailing garbage.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8() { return take(1)[0]; }

  std::uint16_t u16be() {
    auto b = take(2);
    return static_cast<std::uint16_t>(b[0]) << 8 | b[1];
  }

  std::uint32_t u32be() {
    auto b = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = v << 8 | b[i];
    return v;
  }

  std::uint64_t u64be() {
    auto b = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = v << 8 | b[i];
    return v;
  }

  std::uint64_t u64le() {
    auto b = take(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = v << 8 | b[i];
    return v;
  }

  double f64() { return std::bit_cast<double>(u64be()); }

  std::vector<std::uint8_t> var_bytes() {
    std::uint16_t len = u16be();
    auto b = take(len);
    return {b.begin(), b.end()};
  }

  std::span<const std::uint8_t> raw(std::size_t n) { return take(n); }

  std::size_t remaining() const { return data_.size() - pos_; }

  void expect_end() const {
    if (remaining() != 0) {
      throw ProtocolError("trailing bytes after payload");
    }
  }

 private:
  std::span<const std::uint8_t> take(std::size_t n) {
    if (remaining() < n) {
      throw ProtocolError("payload truncated");
    }
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace secagg

#endif  // SECAGG_BYTES_H_

// Copyright 2026 The privdisc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

// Frame and TLV primitives. A frame is "PDS1" || type (1 byte) || body; a
// body is a sequence of (tag: 1 byte, length: u16 big-endian, value) with
// tags in non-decreasing order. Decoding is strict: unknown or unconsumed
// tags, misplaced repeats and trailing bytes are all errors.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "privdisc/bytes.hpp"

namespace privdisc::wire {

inline constexpr std::array<std::uint8_t, 4> kMagic = {'P', 'D', 'S', '1'};
constexpr std::size_t kFrameHeaderSize = kMagic.size() + 1;
constexpr std::size_t kMaxFieldSize = 0xffff;

enum class FrameType : std::uint8_t {
  kMasterPublicKey = 0x01,
  kMasterSecretKey = 0x02,
  kIdentityKey = 0x03,
  kKeyRing = 0x04,
  kIbeCiphertext = 0x05,
  kBlessing = 0x06,
  kPolicy = 0x07,
  kPrefixCiphertext = 0x08,
  kTrustAnchors = 0x09,
  kSigningKey = 0x0a,
  kBroadcast = 0x0b,
  kM1 = 0x10,
  kM2 = 0x11,
  kM3 = 0x12,
  kAppData = 0x13,
  kF1 = 0x20,
  kF2 = 0x21,
  kBeacon = 0x30,
  kReady = 0x31,
};

const char* frame_type_name(FrameType t) noexcept;

class TlvWriter {
 public:
  /// Throws Error(kOversize) past kMaxFieldSize and std::logic_error when
  /// tags are written out of order.
  TlvWriter& put(std::uint8_t tag, ByteView value);
  TlvWriter& put(std::uint8_t tag, std::string_view value) { return put(tag, as_bytes(value)); }
  TlvWriter& put_u8(std::uint8_t tag, std::uint8_t v);
  TlvWriter& put_u16(std::uint8_t tag, std::uint16_t v);
  TlvWriter& put_u64(std::uint8_t tag, std::uint64_t v);
  const Bytes& bytes() const { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
  int last_tag_ = -1;
};

class TlvReader {
 public:
  /// Splits the body into fields. Throws Error(kTruncated) when a field
  /// runs past the end and Error(kMalformed) for descending tags.
  explicit TlvReader(ByteView body);

  /// Exactly one occurrence required.
  ByteView one(std::uint8_t tag);
  /// Zero or one occurrence.
  std::optional<ByteView> maybe(std::uint8_t tag);
  /// Any number of occurrences.
  std::vector<ByteView> many(std::uint8_t tag);

  template <std::size_t N>
  std::array<std::uint8_t, N> fixed(std::uint8_t tag) {
    auto v = one(tag);
    if (v.size() != N) throw Error(Errc::kMalformed, "field " + std::to_string(tag) + " has wrong length");
    std::array<std::uint8_t, N> out{};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
  }
  std::uint8_t u8(std::uint8_t tag);
  std::uint16_t u16(std::uint8_t tag);
  std::uint64_t u64(std::uint8_t tag);
  std::string str(std::uint8_t tag);

  /// Throws Error(kMalformed) if any field was not consumed.
  void finish() const;

 private:
  struct Field {
    std::uint8_t tag;
    ByteView value;
    bool used = false;
  };
  std::vector<Field> fields_;
};

Bytes frame(FrameType type, ByteView body);
/// Validates magic and type and returns the body. Throws Error(kTruncated),
/// Error(kUnknownVersion) for "PDS" with another version digit, or
/// Error(kMalformed).
ByteView unframe(ByteView bytes, FrameType expected);
/// Type of a frame without decoding its body.
FrameType peek_type(ByteView bytes);

}  // namespace privdisc::wire

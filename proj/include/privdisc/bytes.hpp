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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace privdisc {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Key32 = std::array<std::uint8_t, 32>;

/// Error categories surfaced by the library. Protocol-level rejections are
/// reported through status enums instead; `Error` is for malformed input,
/// misuse and environment failures.
enum class Errc {
  kMalformed,
  kTruncated,
  kUnknownVersion,
  kOversize,
  kInvalidName,
  kEntropyFailure,
  kDegenerateKey,
  kCounterOverflow,
  kUnsupported,
  kIo,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}
Bytes to_bytes(std::string_view s);
std::string to_string(ByteView b);

std::string to_hex(ByteView b);
/// Throws Error(kMalformed) on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

inline void append(Bytes& out, ByteView b) { out.insert(out.end(), b.begin(), b.end()); }
void append_u16(Bytes& out, std::uint16_t v);
void append_u32(Bytes& out, std::uint32_t v);
void append_u64(Bytes& out, std::uint64_t v);
/// Appends a u32 length prefix followed by the bytes.
void append_prefixed(Bytes& out, ByteView b);

std::uint64_t load_u64(ByteView b);

bool constant_time_equal(ByteView a, ByteView b) noexcept;
void secure_wipe(std::span<std::uint8_t> b) noexcept;

/// Number of (possibly overlapping) occurrences of `needle` in `haystack`.
std::size_t count_occurrences(ByteView haystack, ByteView needle);

}  // namespace privdisc

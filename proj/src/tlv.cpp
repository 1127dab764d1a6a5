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


#include "privdisc/tlv.hpp"

#include <stdexcept>

namespace privdisc::wire {

const char* frame_type_name(FrameType t) noexcept {
  switch (t) {
    case FrameType::kMasterPublicKey: return "mpk";
    case FrameType::kMasterSecretKey: return "msk";
    case FrameType::kIdentityKey: return "identity-key";
    case FrameType::kKeyRing: return "keyring";
    case FrameType::kIbeCiphertext: return "ibe-ct";
    case FrameType::kBlessing: return "blessing";
    case FrameType::kPolicy: return "policy";
    case FrameType::kPrefixCiphertext: return "prefix-ct";
    case FrameType::kTrustAnchors: return "trust-anchors";
    case FrameType::kSigningKey: return "signing-key";
    case FrameType::kBroadcast: return "broadcast";
    case FrameType::kM1: return "M1";
    case FrameType::kM2: return "M2";
    case FrameType::kM3: return "M3";
    case FrameType::kAppData: return "app-data";
    case FrameType::kF1: return "F1";
    case FrameType::kF2: return "F2";
    case FrameType::kBeacon: return "beacon";
    case FrameType::kReady: return "ready";
  }
  return "unknown";
}

TlvWriter& TlvWriter::put(std::uint8_t tag, ByteView value) {
  if (tag < last_tag_) throw std::logic_error("TLV tags written out of order");
  if (value.size() > kMaxFieldSize) throw Error(Errc::kOversize, "TLV field exceeds 65535 bytes");
  last_tag_ = tag;
  out_.push_back(tag);
  append_u16(out_, static_cast<std::uint16_t>(value.size()));
  append(out_, value);
  return *this;
}

TlvWriter& TlvWriter::put_u8(std::uint8_t tag, std::uint8_t v) {
  const std::uint8_t b[1] = {v};
  return put(tag, ByteView(b));
}

TlvWriter& TlvWriter::put_u16(std::uint8_t tag, std::uint16_t v) {
  Bytes b;
  append_u16(b, v);
  return put(tag, b);
}

TlvWriter& TlvWriter::put_u64(std::uint8_t tag, std::uint64_t v) {
  Bytes b;
  append_u64(b, v);
  return put(tag, b);
}

TlvReader::TlvReader(ByteView body) {
  std::size_t i = 0;
  int last = -1;
  while (i < body.size()) {
    if (body.size() - i < 3) throw Error(Errc::kTruncated, "truncated TLV header");
    const std::uint8_t tag = body[i];
    const std::size_t len = static_cast<std::size_t>(body[i + 1]) << 8 | body[i + 2];
    i += 3;
    if (body.size() - i < len) throw Error(Errc::kTruncated, "truncated TLV value");
    if (tag < last) throw Error(Errc::kMalformed, "TLV tags out of order");
    last = tag;
    fields_.push_back({tag, body.subspan(i, len)});
    i += len;
  }
}

ByteView TlvReader::one(std::uint8_t tag) {
  auto v = maybe(tag);
  if (!v) throw Error(Errc::kMalformed, "missing field " + std::to_string(tag));
  return *v;
}

std::optional<ByteView> TlvReader::maybe(std::uint8_t tag) {
  auto all = many(tag);
  if (all.size() > 1) throw Error(Errc::kMalformed, "repeated field " + std::to_string(tag));
  if (all.empty()) return std::nullopt;
  return all.front();
}

std::vector<ByteView> TlvReader::many(std::uint8_t tag) {
  std::vector<ByteView> out;
  for (auto& f : fields_) {
    if (f.tag != tag) continue;
    if (f.used) throw std::logic_error("TLV field read twice");
    f.used = true;
    out.push_back(f.value);
  }
  return out;
}

std::uint8_t TlvReader::u8(std::uint8_t tag) { return fixed<1>(tag)[0]; }

std::uint16_t TlvReader::u16(std::uint8_t tag) {
  auto b = fixed<2>(tag);
  return static_cast<std::uint16_t>(b[0] << 8 | b[1]);
}

std::uint64_t TlvReader::u64(std::uint8_t tag) { return load_u64(fixed<8>(tag)); }

std::string TlvReader::str(std::uint8_t tag) { return to_string(one(tag)); }

void TlvReader::finish() const {
  for (const auto& f : fields_)
    if (!f.used) throw Error(Errc::kMalformed, "unknown field " + std::to_string(f.tag));
}

Bytes frame(FrameType type, ByteView body) {
  Bytes out(kMagic.begin(), kMagic.end());
  out.push_back(static_cast<std::uint8_t>(type));
  append(out, body);
  return out;
}

FrameType peek_type(ByteView bytes) {
  if (bytes.size() < kFrameHeaderSize) throw Error(Errc::kTruncated, "truncated frame header");
  if (!std::equal(kMagic.begin(), kMagic.end() - 1, bytes.begin()))
    throw Error(Errc::kMalformed, "bad frame magic");
  if (bytes[3] != kMagic[3]) throw Error(Errc::kUnknownVersion, "unknown frame version");
  return static_cast<FrameType>(bytes[4]);
}

ByteView unframe(ByteView bytes, FrameType expected) {
  if (peek_type(bytes) != expected)
    throw Error(Errc::kMalformed, std::string("expected ") + frame_type_name(expected) + " frame");
  return bytes.subspan(kFrameHeaderSize);
}

}  // namespace privdisc::wire

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

// Canonical encodings for every persisted or transmitted object, the
// protocol message structs, and the mDNS TXT / BLE pointer forms.
//
// Every list carries an explicit count and every object's highest tag is a
// required field, so no proper prefix of a valid encoding decodes.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "privdisc/dh.hpp"
#include "privdisc/ibe.hpp"
#include "privdisc/prefix.hpp"
#include "privdisc/principals.hpp"
#include "privdisc/tlv.hpp"

namespace privdisc {

constexpr std::size_t kSessionIdSize = 16;
constexpr std::size_t kBroadcastIdSize = 16;
using SessionId = std::array<std::uint8_t, kSessionIdSize>;
/// 8-byte big-endian counter || 8 random bytes.
using BroadcastId = std::array<std::uint8_t, kBroadcastIdSize>;

enum class AuthMode : std::uint8_t { kCacheable = 1, kUnlinkable = 2, kSigmaBaseline = 3 };
const char* auth_mode_name(AuthMode m) noexcept;

struct Broadcast {
  BroadcastId bid{};
  /// Cleartext copy of the signed expiry, for cheap pre-filtering.
  std::uint64_t expiry_hint = 0;
  prefix::PrefixCiphertext adv_ct;
  bool operator==(const Broadcast&) const = default;
};

struct M1 {
  SessionId sid{};
  dh::Element gx;
  bool operator==(const M1&) const = default;
};

struct M2 {
  SessionId sid{};
  dh::Element gy;
  AuthMode mode = AuthMode::kCacheable;
  /// AEAD ciphertext; used by the cacheable and baseline modes.
  Bytes sealed;
  /// Prefix-encrypted AEAD ciphertext; used by the unlinkable mode.
  std::optional<prefix::PrefixCiphertext> wrapped;
  bool operator==(const M2&) const = default;
};

struct M3 {
  SessionId sid{};
  Bytes sealed;
  bool operator==(const M3&) const = default;
};

struct AppData {
  SessionId sid{};
  std::uint64_t seq = 0;
  Bytes sealed;
  bool operator==(const AppData&) const = default;
};

struct F1 {
  BroadcastId bid{};
  SessionId sid{};
  dh::Element gx;
  std::optional<Bytes> c2;  // early data
  Bytes c1;
  bool operator==(const F1&) const = default;
};

struct F2 {
  BroadcastId bid{};
  SessionId sid{};
  dh::Element gy;
  std::optional<Bytes> c2;  // application data under atk
  Bytes c1;
  bool operator==(const F2&) const = default;
};

constexpr std::size_t kBeaconHashSize = 8;

/// Sender beacon: truncated hash of the sender's contact identifier.
struct Beacon {
  SessionId nonce{};
  std::array<std::uint8_t, kBeaconHashSize> contact_hash{};
  bool operator==(const Beacon&) const = default;
};

/// Receiver's reply to a beacon whose hash matched one of its contacts.
struct Ready {
  SessionId nonce{};
  bool operator==(const Ready&) const = default;
};

namespace wire {

template <class T>
struct Codec;

#define PRIVDISC_CODEC(T, FRAME)                 \
  template <>                                    \
  struct Codec<T> {                              \
    static constexpr FrameType kType = FRAME;    \
    static void write(TlvWriter& w, const T& v); \
    static T read(TlvReader& r);                 \
  }

PRIVDISC_CODEC(ibe::MasterPublicKey, FrameType::kMasterPublicKey);
PRIVDISC_CODEC(ibe::MasterSecretKey, FrameType::kMasterSecretKey);
PRIVDISC_CODEC(ibe::IdentityKey, FrameType::kIdentityKey);
PRIVDISC_CODEC(ibe::Ciphertext, FrameType::kIbeCiphertext);
PRIVDISC_CODEC(prefix::PrefixKeyRing, FrameType::kKeyRing);
PRIVDISC_CODEC(PrefixPolicy, FrameType::kPolicy);
PRIVDISC_CODEC(prefix::PrefixCiphertext, FrameType::kPrefixCiphertext);
PRIVDISC_CODEC(Blessing, FrameType::kBlessing);
PRIVDISC_CODEC(TrustAnchors, FrameType::kTrustAnchors);
PRIVDISC_CODEC(SigningKeyPair, FrameType::kSigningKey);
PRIVDISC_CODEC(Broadcast, FrameType::kBroadcast);
PRIVDISC_CODEC(M1, FrameType::kM1);
PRIVDISC_CODEC(M2, FrameType::kM2);
PRIVDISC_CODEC(M3, FrameType::kM3);
PRIVDISC_CODEC(AppData, FrameType::kAppData);
PRIVDISC_CODEC(F1, FrameType::kF1);
PRIVDISC_CODEC(F2, FrameType::kF2);
PRIVDISC_CODEC(Beacon, FrameType::kBeacon);
PRIVDISC_CODEC(Ready, FrameType::kReady);

#undef PRIVDISC_CODEC

// Nested inside blessings only; has no frame of its own.
template <>
struct Codec<Certificate> {
  static void write(TlvWriter& w, const Certificate& v);
  static Certificate read(TlvReader& r);
};

/// Unframed TLV body, for nesting and for AEAD plaintexts.
template <class T>
Bytes encode_body(const T& v) {
  TlvWriter w;
  Codec<T>::write(w, v);
  return w.take();
}

/// Throws Error(kMalformed | kTruncated) on any structural problem.
template <class T>
T decode_body(ByteView body) {
  try {
    TlvReader r(body);
    T v = Codec<T>::read(r);
    r.finish();
    return v;
  } catch (const Error& e) {
    if (e.code() == Errc::kTruncated || e.code() == Errc::kMalformed) throw;
    throw Error(Errc::kMalformed, e.what());
  }
}

template <class T>
Bytes encode(const T& v) {
  return frame(Codec<T>::kType, encode_body(v));
}

template <class T>
T decode(ByteView bytes) {
  return decode_body<T>(unframe(bytes, Codec<T>::kType));
}

/// Encoded size of a PrefixCiphertext minus its payload, per branch, for a
/// payload whose TLV length header is two bytes.
std::size_t prefix_branch_overhead();

// ---- mDNS TXT ----

inline constexpr std::string_view kServiceLabel = "_private._tcp.local";
constexpr std::size_t kMdnsBudget = 1300;
constexpr std::size_t kTxtChunk = 240;

struct TxtRecord {
  std::string service;
  /// Keys "p0", "p1", ... in numeric order.
  std::vector<std::pair<std::string, std::string>> entries;
  bool operator==(const TxtRecord&) const = default;
};

/// Throws Error(kOversize) when the encoded broadcast exceeds kMdnsBudget.
TxtRecord to_mdns_txt(const Broadcast& b);
TxtRecord to_mdns_txt(ByteView encoded_broadcast);
/// Reassembles the encoded broadcast bytes. Throws Error(kMalformed).
Bytes from_mdns_txt(const TxtRecord& txt);
/// One "key=value" per line after a "service=" line.
std::string txt_to_text(const TxtRecord& txt);

std::string base64url_encode(ByteView b);
/// Rejects padding and characters outside the URL-safe alphabet.
Bytes base64url_decode(std::string_view s);

// ---- BLE pointer ----

constexpr std::size_t kBlePointerSize = 31;
inline constexpr std::array<std::uint8_t, 2> kBleMagic = {'P', 'D'};
constexpr std::uint8_t kBleVersion = 1;

struct Endpoint {
  std::array<std::uint8_t, 16> address{};  // IPv6, or IPv4-mapped
  std::uint16_t port = 0;
  bool operator==(const Endpoint&) const = default;
};

std::array<std::uint8_t, kBlePointerSize> to_ble_pointer(const Endpoint& ep);
/// Throws Error(kMalformed) on bad length, magic, version or reserved bytes.
Endpoint from_ble_pointer(ByteView record);

}  // namespace wire
}  // namespace privdisc

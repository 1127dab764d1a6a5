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
#include <cstdint>
#include <initializer_list>
#include <optional>

#include "privdisc/bytes.hpp"

namespace privdisc {

/// Initializes libsodium once; safe to call repeatedly.
void ensure_sodium();

/// Source of randomness. Every randomized operation in the library draws
/// from an `Entropy` passed by the caller, so a seeded source makes whole
/// protocol runs reproducible.
class Entropy {
 public:
  virtual ~Entropy() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  template <std::size_t N>
  std::array<std::uint8_t, N> draw() {
    std::array<std::uint8_t, N> out{};
    fill(out);
    return out;
  }
};

/// Operating-system randomness (libsodium `randombytes_buf`).
class SystemEntropy final : public Entropy {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

SystemEntropy& system_entropy();

/// Deterministic ChaCha20 keystream keyed by a seed. Each `fill` consumes a
/// fresh nonce, so the output depends on the exact sequence of requests.
class SeededEntropy final : public Entropy {
 public:
  explicit SeededEntropy(std::uint64_t seed);
  explicit SeededEntropy(ByteView seed);
  ~SeededEntropy() override;
  void fill(std::span<std::uint8_t> out) override;

 private:
  Key32 key_{};
  std::uint64_t counter_ = 0;
};

/// One-byte domain-separation tags. Every hash in the library is
/// SHA-256(tag || input) with a distinct tag.
enum class HashDomain : std::uint8_t {
  kIdentityScalar = 0x01,
  kFoScalar = 0x03,
  kFoMask = 0x04,
  kFoKey = 0x05,
  kSigmaHandshake = 0x10,
  kSigmaApplication = 0x11,
  kDiscoverySemiStatic = 0x20,  // H1
  kDiscoveryEphemeral = 0x21,   // H2
  kSignedMessage = 0x30,
  kCertificateChain = 0x31,
  kBlessingDigest = 0x32,
  kBeacon = 0x33,
  kKeyFingerprint = 0x34,
};

Key32 tagged_hash(HashDomain domain, std::initializer_list<ByteView> parts);

/// 512-bit expansion SHA-256(tag || 0x00 || in) || SHA-256(tag || 0x01 || in),
/// used for hash-to-scalar reductions with negligible bias.
std::array<std::uint8_t, 64> tagged_expand64(HashDomain domain, ByteView input);

Key32 hmac_sha256(ByteView key, ByteView message);

/// Counter-mode expansion: block i = HMAC-SHA-256(key, u8(i)), i = 1, 2, ...
Bytes prg_expand(const Key32& key, std::size_t length);

/// HKDF-Extract: HMAC-SHA-256 keyed by the salt.
Key32 hkdf_extract(const Key32& salt, ByteView ikm);

namespace aead {

constexpr std::size_t kKeySize = 32;
constexpr std::size_t kNonceSize = 12;
constexpr std::size_t kTagSize = 16;
using Nonce = std::array<std::uint8_t, kNonceSize>;

/// Nonce layout: 4-byte direction tag || 8-byte big-endian counter.
Nonce make_nonce(std::uint32_t direction, std::uint64_t counter);
inline const Nonce kZeroNonce{};

/// ChaCha20-Poly1305 (IETF).
Bytes seal(const Key32& key, const Nonce& nonce, ByteView plaintext, ByteView ad = {});
std::optional<Bytes> open(const Key32& key, const Nonce& nonce, ByteView ciphertext,
                          ByteView ad = {});

}  // namespace aead

/// Direction tags for handshake nonces.
namespace direction {
constexpr std::uint32_t kServerToClient = 0x7372763e;  // "srv>"
constexpr std::uint32_t kClientToServer = 0x636c693e;  // "cli>"
constexpr std::uint32_t kEarlyData = 0x6561643e;       // "ead>"
constexpr std::uint32_t kApplication = 0x6170703e;     // "app>"
}  // namespace direction

}  // namespace privdisc

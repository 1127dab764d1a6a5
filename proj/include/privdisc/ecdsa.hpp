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

// ECDSA over P-256 with SHA-256 and RFC 6979 deterministic nonces.
// Signatures are raw r || s with s normalized to the lower half of the
// group order; verification rejects the high-s form.

#include <array>
#include <optional>

#include "privdisc/bytes.hpp"
#include "privdisc/crypto.hpp"

namespace privdisc::ecdsa {

constexpr std::size_t kSecretKeySize = 32;
constexpr std::size_t kPublicKeySize = 33;  // SEC1 compressed
constexpr std::size_t kSignatureSize = 64;

using PublicKey = std::array<std::uint8_t, kPublicKeySize>;
using Signature = std::array<std::uint8_t, kSignatureSize>;
using Digest = std::array<std::uint8_t, 32>;

class SecretKey {
 public:
  SecretKey() = default;
  SecretKey(const SecretKey&) = default;
  SecretKey& operator=(const SecretKey&) = default;
  ~SecretKey() { secure_wipe(k_); }

  /// Rejects zero and values >= n.
  static std::optional<SecretKey> from_bytes(ByteView b);
  static SecretKey random(Entropy& entropy);
  const std::array<std::uint8_t, kSecretKeySize>& bytes() const { return k_; }
  PublicKey public_key() const;
  bool operator==(const SecretKey&) const = default;

 private:
  std::array<std::uint8_t, kSecretKeySize> k_{};
};

/// True for a compressed encoding of a point on the curve (not infinity).
bool valid_public_key(ByteView pub);

/// Signs a 32-byte message digest. The nonce is derived per RFC 6979 from
/// the secret key and the digest.
Signature sign_digest(const SecretKey& sk, const Digest& digest);
bool verify_digest(ByteView pub, const Digest& digest, ByteView sig);

/// The RFC 6979 nonce for (sk, digest), exposed for test vectors.
std::array<std::uint8_t, 32> rfc6979_nonce(const SecretKey& sk, const Digest& digest);

}  // namespace privdisc::ecdsa

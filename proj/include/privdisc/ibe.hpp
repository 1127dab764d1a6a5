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

// Boneh-Boyen (BB2) identity-based encryption made CCA-secure with the
// Fujisaki-Okamoto hybrid transform.
//
//   mpk = (X = g1^x, Y = g1^y, v = e(g1, g2)),  msk = (x, y)
//   sk_id = (r, K = g2^{1/(x + h(id) + r*y)})
//
//   Encrypt(id, m): sigma <- random; s = H3(sigma || m)
//     C1 = (X * g1^h(id))^s,  C2 = Y^s
//     masked = sigma XOR H4(v^s),  sym = AEAD_{H5(sigma)}(m)
//   Decrypt: v^s = e(C1 * C2^r, K); unmask sigma; open sym; recompute
//     s and (C1, C2) and accept only on an exact match.

#include <array>
#include <optional>

#include "privdisc/bytes.hpp"
#include "privdisc/crypto.hpp"
#include "privdisc/group.hpp"

namespace privdisc::ibe {

using pairing::G1;
using pairing::G2;
using pairing::GroupParams;
using pairing::Gt;
using pairing::Scalar;

constexpr std::size_t kSeedSize = 32;
constexpr std::size_t kMaxPlaintext = 65535;
constexpr int kExtractRetries = 8;
/// Bytes a ciphertext adds on top of its plaintext (C1, C2, masked seed,
/// AEAD tag), before wire framing.
constexpr std::size_t kCiphertextOverhead =
    pairing::kG1Size * 2 + kSeedSize + aead::kTagSize;

using Seed = std::array<std::uint8_t, kSeedSize>;

struct MasterPublicKey {
  G1 X;
  G1 Y;
  Gt v;
  bool operator==(const MasterPublicKey&) const = default;
};

struct MasterSecretKey {
  Scalar x;
  Scalar y;
  void wipe() noexcept {
    x.wipe();
    y.wipe();
  }
  bool operator==(const MasterSecretKey&) const = default;
};

struct MasterKeyPair {
  MasterPublicKey mpk;
  MasterSecretKey msk;
};

struct IdentityKey {
  Bytes identity;
  Scalar r;
  G2 K;
  bool operator==(const IdentityKey&) const = default;
};

struct Ciphertext {
  G1 c1;
  G1 c2;
  Seed masked_seed{};
  Bytes sym_ct;
  bool operator==(const Ciphertext&) const = default;
};

/// Maps an identity to Z_p: SHA-256 512-bit expansion, reduced mod p.
Scalar hash_to_scalar(ByteView identity);

/// Checks X, Y are non-identity group elements and v = e(g1, g2).
bool valid_public_key(const MasterPublicKey& mpk, const GroupParams& params);

MasterKeyPair setup(const GroupParams& params, Entropy& entropy);

/// Throws Error(kMalformed) for an empty identity and Error(kDegenerateKey)
/// if x + h(id) + r*y stays zero after kExtractRetries samples of r.
IdentityKey extract(const MasterSecretKey& msk, ByteView identity, Entropy& entropy);

/// Throws Error(kOversize) when the plaintext exceeds kMaxPlaintext.
Ciphertext encrypt(const MasterPublicKey& mpk, ByteView identity, ByteView plaintext,
                   Entropy& entropy);

/// Deterministic encryption with a caller-chosen FO seed.
Ciphertext encrypt_with_seed(const MasterPublicKey& mpk, ByteView identity, ByteView plaintext,
                             const Seed& seed);

/// Returns the plaintext, or nullopt for every kind of failure.
std::optional<Bytes> decrypt(const MasterPublicKey& mpk, const IdentityKey& key,
                             const Ciphertext& ct);

}  // namespace privdisc::ibe

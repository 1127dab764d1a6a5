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

// Signing keys, certificate chains ("blessings") that bind hierarchical
// names to keys, and the identity providers that issue them.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "privdisc/ecdsa.hpp"
#include "privdisc/ibe.hpp"
#include "privdisc/names.hpp"
#include "privdisc/prefix.hpp"

namespace privdisc {

using ecdsa::PublicKey;
using ecdsa::Signature;

/// Context labels for every signature the library produces.
namespace label {
inline constexpr std::string_view kCertificate = "privdisc/certificate";
inline constexpr std::string_view kResponse = "privdisc/m2";
inline constexpr std::string_view kFinish = "privdisc/m3";
inline constexpr std::string_view kBroadcast = "privdisc/broadcast";
inline constexpr std::string_view kConnect = "privdisc/f1";
}  // namespace label

struct SigningKeyPair {
  ecdsa::SecretKey secret;
  PublicKey pub{};

  static SigningKeyPair generate(Entropy& entropy);
  static SigningKeyPair from_secret(const ecdsa::SecretKey& sk);
  bool operator==(const SigningKeyPair&) const = default;
};

/// Signs SHA-256(0x30 || u8 len(label) || label || signer public key || message).
Signature sign(const SigningKeyPair& key, std::string_view context_label, ByteView message);
bool verify(ByteView pub, std::string_view context_label, ByteView message, ByteView sig);

struct Certificate {
  std::string extension;
  PublicKey subject{};
  Signature signature{};
  bool operator==(const Certificate&) const = default;
};

struct Blessing {
  std::vector<Certificate> chain;

  /// Extensions joined by '/'. Throws Error(kInvalidName) on a malformed chain.
  HierName name() const;
  const PublicKey& public_key() const { return chain.back().subject; }
  /// The leading `n` certificates.
  Blessing truncated(std::size_t n) const;
  bool operator==(const Blessing&) const = default;
};

/// Running digest over the first `n` certificates: d0 = H(0x31),
/// d(i+1) = H(0x31 || d(i) || u8 len(ext) || ext || subject).
Key32 chain_digest(const std::vector<Certificate>& chain, std::size_t n);

/// Digest identifying a blessing (its names and keys).
Key32 blessing_digest(const Blessing& b);

struct TrustAnchor {
  std::string root_name;
  PublicKey key{};
  bool operator==(const TrustAnchor&) const = default;
};
using TrustAnchors = std::vector<TrustAnchor>;

enum class ChainStatus { kOk, kBrokenLink, kUntrustedRoot, kMalformed };
const char* chain_status_name(ChainStatus s) noexcept;

struct ChainResult {
  ChainStatus status = ChainStatus::kMalformed;
  std::optional<HierName> name;
  bool ok() const { return status == ChainStatus::kOk; }
};

ChainResult validate_chain(const Blessing& b, const TrustAnchors& roots);

struct Principal {
  SigningKeyPair keypair;
  std::vector<Blessing> blessings;
  /// keyrings[i] belongs to blessings[i] when present.
  std::vector<std::optional<prefix::PrefixKeyRing>> keyrings;
  /// Local authorization policy (pi).
  std::optional<PrefixPolicy> policy;
  /// Present for identity providers that act as IBE roots.
  std::optional<ibe::MasterKeyPair> ibe_root;

  const Blessing& blessing() const;
  HierName name() const { return blessing().name(); }
  const prefix::PrefixKeyRing* keyring() const;
  TrustAnchor trust_anchor() const;
};

/// Self-signed identity provider holding a fresh IBE master key pair.
Principal new_root(std::string_view name_component, Entropy& entropy,
                   const pairing::GroupParams& params = pairing::GroupParams::bls12_381());

/// Extends the issuer's first blessing by one certificate for `subject`.
/// Throws Error(kInvalidName) for an invalid extension.
Blessing bless(const Principal& issuer, const PublicKey& subject, std::string_view extension);

/// Issues a blessing for `name`, which must extend the identity provider's
/// own name. Intermediate certificates are bound to the provider's key.
Blessing issue_blessing(const Principal& idp, const HierName& name, const PublicKey& subject);

/// Throws Error(kUnsupported) when the provider is not an IBE root.
prefix::PrefixKeyRing issue_keyring(const Principal& idp, const HierName& name, Entropy& entropy);

/// New principal with a fresh key pair, a blessing for `name` and its keyring.
Principal make_principal(const Principal& idp, const HierName& name, Entropy& entropy,
                         std::optional<PrefixPolicy> policy = std::nullopt);

}  // namespace privdisc

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


#include "privdisc/principals.hpp"

namespace privdisc {

namespace {

Bytes certificate_message(const Key32& parent_digest, const std::string& ext, const PublicKey& subject) {
  Bytes m(parent_digest.begin(), parent_digest.end());
  m.push_back(static_cast<std::uint8_t>(ext.size()));
  append(m, as_bytes(ext));
  append(m, subject);
  return m;
}

Certificate make_certificate(const SigningKeyPair& issuer, const Key32& parent_digest,
                             std::string_view ext, const PublicKey& subject) {
  if (!is_valid_component(ext)) throw Error(Errc::kInvalidName, "invalid extension '" + std::string(ext) + "'");
  Certificate c{std::string(ext), subject, {}};
  c.signature = sign(issuer, label::kCertificate, certificate_message(parent_digest, c.extension, subject));
  return c;
}

}  // namespace

SigningKeyPair SigningKeyPair::generate(Entropy& entropy) {
  return from_secret(ecdsa::SecretKey::random(entropy));
}

SigningKeyPair SigningKeyPair::from_secret(const ecdsa::SecretKey& sk) { return {sk, sk.public_key()}; }

namespace {

ecdsa::Digest signed_digest(ByteView pub, std::string_view context_label, ByteView message) {
  const std::uint8_t len[1] = {static_cast<std::uint8_t>(context_label.size())};
  return tagged_hash(HashDomain::kSignedMessage, {len, as_bytes(context_label), pub, message});
}

}  // namespace

Signature sign(const SigningKeyPair& key, std::string_view context_label, ByteView message) {
  return ecdsa::sign_digest(key.secret, signed_digest(key.pub, context_label, message));
}

bool verify(ByteView pub, std::string_view context_label, ByteView message, ByteView sig) {
  if (pub.size() != ecdsa::kPublicKeySize) return false;
  return ecdsa::verify_digest(pub, signed_digest(pub, context_label, message), sig);
}

HierName Blessing::name() const {
  std::vector<std::string> parts;
  parts.reserve(chain.size());
  for (const auto& c : chain) parts.push_back(c.extension);
  return HierName(std::move(parts));
}

Blessing Blessing::truncated(std::size_t n) const {
  if (n == 0 || n > chain.size()) throw Error(Errc::kMalformed, "truncation length out of range");
  return Blessing{std::vector<Certificate>(chain.begin(), chain.begin() + n)};
}

Key32 chain_digest(const std::vector<Certificate>& chain, std::size_t n) {
  Key32 d = tagged_hash(HashDomain::kCertificateChain, {});
  for (std::size_t i = 0; i < n && i < chain.size(); ++i) {
    const auto& c = chain[i];
    const std::uint8_t len[1] = {static_cast<std::uint8_t>(c.extension.size())};
    d = tagged_hash(HashDomain::kCertificateChain, {d, len, as_bytes(c.extension), c.subject});
  }
  return d;
}

Key32 blessing_digest(const Blessing& b) {
  auto d = chain_digest(b.chain, b.chain.size());
  return tagged_hash(HashDomain::kBlessingDigest, {d});
}

const char* chain_status_name(ChainStatus s) noexcept {
  switch (s) {
    case ChainStatus::kOk: return "ok";
    case ChainStatus::kBrokenLink: return "broken-link";
    case ChainStatus::kUntrustedRoot: return "untrusted-root";
    case ChainStatus::kMalformed: return "malformed";
  }
  return "unknown";
}

ChainResult validate_chain(const Blessing& b, const TrustAnchors& roots) {
  if (b.chain.empty() || b.chain.size() > kMaxNameComponents) return {ChainStatus::kMalformed, {}};
  for (const auto& c : b.chain)
    if (!is_valid_component(c.extension) || !ecdsa::valid_public_key(c.subject))
      return {ChainStatus::kMalformed, {}};

  Key32 digest = chain_digest(b.chain, 0);
  for (std::size_t i = 0; i < b.chain.size(); ++i) {
    const auto& c = b.chain[i];
    const PublicKey& issuer = i == 0 ? c.subject : b.chain[i - 1].subject;
    if (!verify(issuer, label::kCertificate, certificate_message(digest, c.extension, c.subject), c.signature))
      return {ChainStatus::kBrokenLink, {}};
    if (i == 0) {
      bool trusted = false;
      for (const auto& a : roots) trusted |= (a.root_name == c.extension && a.key == c.subject);
      if (!trusted) return {ChainStatus::kUntrustedRoot, {}};
    }
    digest = chain_digest(b.chain, i + 1);
  }
  return {ChainStatus::kOk, b.name()};
}

const Blessing& Principal::blessing() const {
  if (blessings.empty()) throw Error(Errc::kMalformed, "principal holds no blessing");
  return blessings.front();
}

const prefix::PrefixKeyRing* Principal::keyring() const {
  if (keyrings.empty() || !keyrings.front()) return nullptr;
  return &*keyrings.front();
}

TrustAnchor Principal::trust_anchor() const {
  const auto& root = blessing().chain.front();
  return {root.extension, root.subject};
}

Principal new_root(std::string_view name_component, Entropy& entropy, const pairing::GroupParams& params) {
  Principal p;
  p.keypair = SigningKeyPair::generate(entropy);
  p.blessings.push_back(
      Blessing{{make_certificate(p.keypair, chain_digest({}, 0), name_component, p.keypair.pub)}});
  p.ibe_root = ibe::setup(params, entropy);
  p.keyrings.push_back(prefix::keyring_extract(*p.ibe_root, p.name(), entropy));
  return p;
}

Blessing bless(const Principal& issuer, const PublicKey& subject, std::string_view extension) {
  const Blessing& parent = issuer.blessing();
  if (parent.public_key() != issuer.keypair.pub)
    throw Error(Errc::kMalformed, "issuer blessing is not bound to the issuer key");
  Blessing out = parent;
  out.chain.push_back(make_certificate(issuer.keypair, chain_digest(parent.chain, parent.chain.size()),
                                       extension, subject));
  if (out.chain.size() > kMaxNameComponents) throw Error(Errc::kInvalidName, "blessing too deep");
  return out;
}

Blessing issue_blessing(const Principal& idp, const HierName& name, const PublicKey& subject) {
  const Blessing& base = idp.blessing();
  const HierName idp_name = base.name();
  if (!name.has_prefix(idp_name) || name.depth() == idp_name.depth())
    throw Error(Errc::kInvalidName, "'" + name.str() + "' does not extend '" + idp_name.str() + "'");
  Blessing out = base;
  for (std::size_t i = idp_name.depth(); i < name.depth(); ++i) {
    const bool last = i + 1 == name.depth();
    out.chain.push_back(make_certificate(idp.keypair, chain_digest(out.chain, out.chain.size()),
                                         name.components()[i], last ? subject : idp.keypair.pub));
  }
  return out;
}

prefix::PrefixKeyRing issue_keyring(const Principal& idp, const HierName& name, Entropy& entropy) {
  if (!idp.ibe_root) throw Error(Errc::kUnsupported, "identity provider holds no IBE master key");
  return prefix::keyring_extract(*idp.ibe_root, name, entropy);
}

Principal make_principal(const Principal& idp, const HierName& name, Entropy& entropy,
                         std::optional<PrefixPolicy> policy) {
  Principal p;
  p.keypair = SigningKeyPair::generate(entropy);
  p.blessings.push_back(issue_blessing(idp, name, p.keypair.pub));
  p.keyrings.push_back(issue_keyring(idp, name, entropy));
  p.policy = std::move(policy);
  return p;
}

}  // namespace privdisc

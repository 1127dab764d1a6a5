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


#include "privdisc/wire.hpp"

namespace privdisc {

const char* auth_mode_name(AuthMode m) noexcept {
  switch (m) {
    case AuthMode::kCacheable: return "cacheable";
    case AuthMode::kUnlinkable: return "unlinkable";
    case AuthMode::kSigmaBaseline: return "sigma-baseline";
  }
  return "unknown";
}

namespace wire {

namespace {

using pairing::G1;
using pairing::G2;
using pairing::Gt;
using pairing::Scalar;

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::kMalformed, what); }

G1 read_g1(TlvReader& r, std::uint8_t tag) {
  auto p = G1::from_bytes(r.one(tag));
  if (!p) malformed("invalid G1 element");
  return *p;
}

G2 read_g2(TlvReader& r, std::uint8_t tag) {
  auto p = G2::from_bytes(r.one(tag));
  if (!p) malformed("invalid G2 element");
  return *p;
}

Scalar read_scalar(TlvReader& r, std::uint8_t tag) {
  auto s = Scalar::from_canonical(r.one(tag));
  if (!s) malformed("non-canonical scalar");
  return *s;
}

dh::Element read_element(TlvReader& r, std::uint8_t tag) {
  auto e = dh::Element::from_bytes(r.one(tag));
  if (!e) malformed("invalid DH element");
  return *e;
}

template <class T>
std::vector<T> read_list(TlvReader& r, std::uint8_t count_tag, std::uint8_t item_tag, bool wide_count) {
  const std::size_t count = wide_count ? r.u16(count_tag) : r.u8(count_tag);
  auto items = r.many(item_tag);
  if (items.size() != count) malformed("list count mismatch");
  std::vector<T> out;
  out.reserve(count);
  for (auto item : items) out.push_back(decode_body<T>(item));
  return out;
}

const pairing::GroupParams& read_curve(TlvReader& r) {
  auto id = r.str(1);
  try {
    return pairing::GroupParams::by_id(id);
  } catch (const Error&) {
    malformed("unsupported curve '" + id + "'");
  }
}

}  // namespace

// ---- IBE ----

void Codec<ibe::MasterPublicKey>::write(TlvWriter& w, const ibe::MasterPublicKey& v) {
  w.put(1, pairing::GroupParams::bls12_381().curve_id)
      .put(2, v.X.to_bytes())
      .put(3, v.Y.to_bytes())
      .put(4, v.v.to_bytes());
}

ibe::MasterPublicKey Codec<ibe::MasterPublicKey>::read(TlvReader& r) {
  const auto& params = read_curve(r);
  ibe::MasterPublicKey mpk;
  mpk.X = read_g1(r, 2);
  mpk.Y = read_g1(r, 3);
  auto v = Gt::from_bytes(r.one(4));
  if (!v) malformed("invalid Gt element");
  mpk.v = *v;
  if (!ibe::valid_public_key(mpk, params)) malformed("inconsistent master public key");
  return mpk;
}

void Codec<ibe::MasterSecretKey>::write(TlvWriter& w, const ibe::MasterSecretKey& v) {
  w.put(1, pairing::GroupParams::bls12_381().curve_id).put(2, v.x.to_bytes()).put(3, v.y.to_bytes());
}

ibe::MasterSecretKey Codec<ibe::MasterSecretKey>::read(TlvReader& r) {
  read_curve(r);
  ibe::MasterSecretKey msk;
  msk.x = read_scalar(r, 2);
  msk.y = read_scalar(r, 3);
  if (msk.x.is_zero() || msk.y.is_zero()) malformed("zero master secret");
  return msk;
}

void Codec<ibe::IdentityKey>::write(TlvWriter& w, const ibe::IdentityKey& v) {
  w.put(1, v.identity).put(2, v.r.to_bytes()).put(3, v.K.to_bytes());
}

ibe::IdentityKey Codec<ibe::IdentityKey>::read(TlvReader& r) {
  ibe::IdentityKey k;
  auto id = r.one(1);
  if (id.empty()) malformed("empty identity");
  k.identity.assign(id.begin(), id.end());
  k.r = read_scalar(r, 2);
  k.K = read_g2(r, 3);
  if (k.K.is_identity()) malformed("identity key at infinity");
  return k;
}

void Codec<ibe::Ciphertext>::write(TlvWriter& w, const ibe::Ciphertext& v) {
  w.put(1, v.c1.to_bytes()).put(2, v.c2.to_bytes()).put(3, v.masked_seed).put(4, v.sym_ct);
}

ibe::Ciphertext Codec<ibe::Ciphertext>::read(TlvReader& r) {
  ibe::Ciphertext ct;
  ct.c1 = read_g1(r, 1);
  ct.c2 = read_g1(r, 2);
  ct.masked_seed = r.fixed<ibe::kSeedSize>(3);
  auto sym = r.one(4);
  if (sym.size() < aead::kTagSize) malformed("short symmetric ciphertext");
  ct.sym_ct.assign(sym.begin(), sym.end());
  return ct;
}

// ---- prefix encryption ----

void Codec<prefix::PrefixKeyRing>::write(TlvWriter& w, const prefix::PrefixKeyRing& v) {
  w.put(1, v.name.str()).put(2, encode_body(v.mpk)).put_u8(3, static_cast<std::uint8_t>(v.keys.size()));
  for (const auto& k : v.keys) w.put(4, encode_body(k));
}

prefix::PrefixKeyRing Codec<prefix::PrefixKeyRing>::read(TlvReader& r) {
  prefix::PrefixKeyRing ring{HierName::parse(r.str(1)), decode_body<ibe::MasterPublicKey>(r.one(2)),
                             read_list<ibe::IdentityKey>(r, 3, 4, false)};
  if (!ring.well_formed()) malformed("keyring identities do not match its name");
  return ring;
}

void Codec<PrefixPolicy>::write(TlvWriter& w, const PrefixPolicy& v) {
  w.put_u16(1, static_cast<std::uint16_t>(v.size()));
  for (const auto& p : v.prefixes()) w.put(2, p.str());
}

PrefixPolicy Codec<PrefixPolicy>::read(TlvReader& r) {
  const std::size_t count = r.u16(1);
  auto items = r.many(2);
  if (items.size() != count) malformed("policy count mismatch");
  std::vector<HierName> names;
  for (auto item : items) names.push_back(HierName::parse(to_string(item)));
  if (!PrefixPolicy::is_normalized(names)) malformed("policy not in normal form");
  return PrefixPolicy(std::move(names));
}

void Codec<prefix::PrefixCiphertext>::write(TlvWriter& w, const prefix::PrefixCiphertext& v) {
  if (!v.well_formed()) throw Error(Errc::kMalformed, "branches do not match policy");
  w.put(1, encode_body(v.policy));
  for (const auto& b : v.branches) w.put(2, encode_body(b.ct));
}

prefix::PrefixCiphertext Codec<prefix::PrefixCiphertext>::read(TlvReader& r) {
  prefix::PrefixCiphertext ct{decode_body<PrefixPolicy>(r.one(1)), {}};
  auto items = r.many(2);
  if (items.size() != ct.policy.size()) malformed("branch count mismatch");
  for (std::size_t i = 0; i < items.size(); ++i)
    ct.branches.push_back({ct.policy.prefixes()[i], decode_body<ibe::Ciphertext>(items[i])});
  return ct;
}

std::size_t prefix_branch_overhead() {
  // Branch field header, four ciphertext field headers, C1, C2, seed, tag.
  return 3 + 4 * 3 + 2 * pairing::kG1Size + ibe::kSeedSize + aead::kTagSize;
}

// ---- principals ----

void Codec<Certificate>::write(TlvWriter& w, const Certificate& v) {
  w.put(1, v.extension).put(2, v.subject).put(3, v.signature);
}

Certificate Codec<Certificate>::read(TlvReader& r) {
  Certificate c;
  c.extension = r.str(1);
  if (!is_valid_component(c.extension)) malformed("invalid certificate extension");
  c.subject = r.fixed<ecdsa::kPublicKeySize>(2);
  c.signature = r.fixed<ecdsa::kSignatureSize>(3);
  return c;
}

void Codec<Blessing>::write(TlvWriter& w, const Blessing& v) {
  w.put_u8(1, static_cast<std::uint8_t>(v.chain.size()));
  for (const auto& c : v.chain) w.put(2, encode_body(c));
}

Blessing Codec<Blessing>::read(TlvReader& r) {
  Blessing b{read_list<Certificate>(r, 1, 2, false)};
  if (b.chain.empty() || b.chain.size() > kMaxNameComponents) malformed("bad chain length");
  return b;
}

namespace {

Bytes anchor_body(const TrustAnchor& a) {
  TlvWriter w;
  w.put(1, a.root_name).put(2, a.key);
  return w.take();
}

TrustAnchor anchor_read(ByteView body) {
  TlvReader r(body);
  TrustAnchor a{r.str(1), r.fixed<ecdsa::kPublicKeySize>(2)};
  r.finish();
  if (!is_valid_component(a.root_name)) malformed("invalid root name");
  return a;
}

}  // namespace

void Codec<TrustAnchors>::write(TlvWriter& w, const TrustAnchors& v) {
  w.put_u16(1, static_cast<std::uint16_t>(v.size()));
  for (const auto& a : v) w.put(2, anchor_body(a));
}

TrustAnchors Codec<TrustAnchors>::read(TlvReader& r) {
  const std::size_t count = r.u16(1);
  auto items = r.many(2);
  if (items.size() != count) malformed("anchor count mismatch");
  TrustAnchors out;
  for (auto item : items) out.push_back(anchor_read(item));
  return out;
}

void Codec<SigningKeyPair>::write(TlvWriter& w, const SigningKeyPair& v) {
  w.put(1, v.secret.bytes()).put(2, v.pub);
}

SigningKeyPair Codec<SigningKeyPair>::read(TlvReader& r) {
  auto sk = ecdsa::SecretKey::from_bytes(r.one(1));
  if (!sk) malformed("invalid signing key");
  auto kp = SigningKeyPair::from_secret(*sk);
  if (kp.pub != r.fixed<ecdsa::kPublicKeySize>(2)) malformed("public key does not match secret");
  return kp;
}

// ---- protocol messages ----

void Codec<Broadcast>::write(TlvWriter& w, const Broadcast& v) {
  w.put(1, v.bid).put_u64(2, v.expiry_hint).put(3, encode_body(v.adv_ct));
}

Broadcast Codec<Broadcast>::read(TlvReader& r) {
  auto bid = r.fixed<kBroadcastIdSize>(1);
  auto expiry = r.u64(2);
  return Broadcast{bid, expiry, decode_body<prefix::PrefixCiphertext>(r.one(3))};
}

void Codec<M1>::write(TlvWriter& w, const M1& v) { w.put(1, v.sid).put(2, v.gx.view()); }

M1 Codec<M1>::read(TlvReader& r) {
  M1 m;
  m.sid = r.fixed<kSessionIdSize>(1);
  m.gx = read_element(r, 2);
  return m;
}

void Codec<M2>::write(TlvWriter& w, const M2& v) {
  w.put(1, v.sid).put(2, v.gy.view()).put_u8(3, static_cast<std::uint8_t>(v.mode));
  if (v.mode == AuthMode::kUnlinkable) {
    if (!v.wrapped || !v.sealed.empty()) throw Error(Errc::kMalformed, "unlinkable M2 needs wrapped only");
    w.put(5, encode_body(*v.wrapped));
  } else {
    if (v.wrapped) throw Error(Errc::kMalformed, "wrapped payload outside unlinkable mode");
    w.put(4, v.sealed);
  }
}

M2 Codec<M2>::read(TlvReader& r) {
  M2 m;
  m.sid = r.fixed<kSessionIdSize>(1);
  m.gy = read_element(r, 2);
  const auto mode = r.u8(3);
  if (mode < 1 || mode > 3) malformed("unknown auth mode");
  m.mode = static_cast<AuthMode>(mode);
  if (m.mode == AuthMode::kUnlinkable) {
    m.wrapped = decode_body<prefix::PrefixCiphertext>(r.one(5));
  } else {
    auto s = r.one(4);
    m.sealed.assign(s.begin(), s.end());
  }
  return m;
}

void Codec<M3>::write(TlvWriter& w, const M3& v) { w.put(1, v.sid).put(2, v.sealed); }

M3 Codec<M3>::read(TlvReader& r) {
  M3 m;
  m.sid = r.fixed<kSessionIdSize>(1);
  auto s = r.one(2);
  m.sealed.assign(s.begin(), s.end());
  return m;
}

void Codec<AppData>::write(TlvWriter& w, const AppData& v) {
  w.put(1, v.sid).put_u64(2, v.seq).put(3, v.sealed);
}

AppData Codec<AppData>::read(TlvReader& r) {
  AppData m;
  m.sid = r.fixed<kSessionIdSize>(1);
  m.seq = r.u64(2);
  auto s = r.one(3);
  m.sealed.assign(s.begin(), s.end());
  return m;
}

namespace {

template <class F>
void write_flight(TlvWriter& w, const F& v, const dh::Element& share) {
  w.put(1, v.bid).put(2, v.sid).put(3, share.view());
  if (v.c2) w.put(4, *v.c2);
  w.put(5, v.c1);
}

template <class F>
F read_flight(TlvReader& r, dh::Element F::*share) {
  F f;
  f.bid = r.fixed<kBroadcastIdSize>(1);
  f.sid = r.fixed<kSessionIdSize>(2);
  f.*share = read_element(r, 3);
  if (auto c2 = r.maybe(4)) f.c2 = Bytes(c2->begin(), c2->end());
  auto c1 = r.one(5);
  f.c1.assign(c1.begin(), c1.end());
  return f;
}

}  // namespace

void Codec<F1>::write(TlvWriter& w, const F1& v) { write_flight(w, v, v.gx); }
F1 Codec<F1>::read(TlvReader& r) { return read_flight<F1>(r, &F1::gx); }
void Codec<F2>::write(TlvWriter& w, const F2& v) { write_flight(w, v, v.gy); }
F2 Codec<F2>::read(TlvReader& r) { return read_flight<F2>(r, &F2::gy); }

void Codec<Beacon>::write(TlvWriter& w, const Beacon& v) { w.put(1, v.nonce).put(2, v.contact_hash); }

Beacon Codec<Beacon>::read(TlvReader& r) {
  Beacon b;
  b.nonce = r.fixed<kSessionIdSize>(1);
  b.contact_hash = r.fixed<kBeaconHashSize>(2);
  return b;
}

void Codec<Ready>::write(TlvWriter& w, const Ready& v) { w.put(1, v.nonce); }

Ready Codec<Ready>::read(TlvReader& r) { return Ready{r.fixed<kSessionIdSize>(1)}; }

}  // namespace wire
}  // namespace privdisc

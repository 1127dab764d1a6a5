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


#include "privdisc/ecdsa.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>

#include <memory>

namespace privdisc::ecdsa {

namespace {

struct BnFree {
  void operator()(BIGNUM* b) const { BN_clear_free(b); }
};
struct CtxFree {
  void operator()(BN_CTX* c) const { BN_CTX_free(c); }
};
struct PointFree {
  void operator()(EC_POINT* p) const { EC_POINT_clear_free(p); }
};
using Bn = std::unique_ptr<BIGNUM, BnFree>;
using Ctx = std::unique_ptr<BN_CTX, CtxFree>;
using Point = std::unique_ptr<EC_POINT, PointFree>;

const EC_GROUP* curve() {
  static EC_GROUP* g = EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1);
  if (!g) throw Error(Errc::kUnsupported, "P-256 unavailable");
  return g;
}

const BIGNUM* order() { return EC_GROUP_get0_order(curve()); }

Bn bn_new() {
  Bn b(BN_new());
  if (!b) throw std::bad_alloc();
  return b;
}

Bn bn_from(ByteView b) {
  Bn out(BN_bin2bn(b.data(), static_cast<int>(b.size()), nullptr));
  if (!out) throw std::bad_alloc();
  return out;
}

std::array<std::uint8_t, 32> bn_to32(const BIGNUM* b) {
  std::array<std::uint8_t, 32> out{};
  BN_bn2binpad(b, out.data(), 32);
  return out;
}

Ctx ctx_new() {
  Ctx c(BN_CTX_new());
  if (!c) throw std::bad_alloc();
  return c;
}

bool in_range(const BIGNUM* v) { return !BN_is_zero(v) && !BN_is_negative(v) && BN_cmp(v, order()) < 0; }

Point decode_point(ByteView pub, BN_CTX* ctx) {
  if (pub.size() != kPublicKeySize || (pub[0] != 0x02 && pub[0] != 0x03)) return nullptr;
  Point p(EC_POINT_new(curve()));
  if (!p || EC_POINT_oct2point(curve(), p.get(), pub.data(), pub.size(), ctx) != 1) return nullptr;
  if (EC_POINT_is_at_infinity(curve(), p.get()) || EC_POINT_is_on_curve(curve(), p.get(), ctx) != 1)
    return nullptr;
  return p;
}

// r = x(k*G) mod n.
Bn r_of(const BIGNUM* k, BN_CTX* ctx) {
  Point R(EC_POINT_new(curve()));
  Bn x = bn_new();
  Bn r = bn_new();
  if (!R || EC_POINT_mul(curve(), R.get(), k, nullptr, nullptr, ctx) != 1 ||
      EC_POINT_get_affine_coordinates(curve(), R.get(), x.get(), nullptr, ctx) != 1 ||
      BN_nnmod(r.get(), x.get(), order(), ctx) != 1)
    throw Error(Errc::kUnsupported, "EC arithmetic failed");
  return r;
}

}  // namespace

std::optional<SecretKey> SecretKey::from_bytes(ByteView b) {
  if (b.size() != kSecretKeySize) return std::nullopt;
  Bn v = bn_from(b);
  if (!in_range(v.get())) return std::nullopt;
  SecretKey sk;
  std::copy(b.begin(), b.end(), sk.k_.begin());
  return sk;
}

SecretKey SecretKey::random(Entropy& entropy) {
  for (;;) {
    auto buf = entropy.draw<kSecretKeySize>();
    auto sk = from_bytes(buf);
    secure_wipe(buf);
    if (sk) return *sk;
  }
}

PublicKey SecretKey::public_key() const {
  Ctx ctx = ctx_new();
  Bn d = bn_from(k_);
  Point Q(EC_POINT_new(curve()));
  PublicKey out{};
  if (!Q || EC_POINT_mul(curve(), Q.get(), d.get(), nullptr, nullptr, ctx.get()) != 1 ||
      EC_POINT_point2oct(curve(), Q.get(), POINT_CONVERSION_COMPRESSED, out.data(), out.size(),
                         ctx.get()) != kPublicKeySize)
    throw Error(Errc::kUnsupported, "EC arithmetic failed");
  return out;
}

bool valid_public_key(ByteView pub) {
  Ctx ctx = ctx_new();
  return decode_point(pub, ctx.get()) != nullptr;
}

std::array<std::uint8_t, 32> rfc6979_nonce(const SecretKey& sk, const Digest& digest) {
  Ctx ctx = ctx_new();
  // qlen == hlen == 256, so bits2octets(h) is h mod n.
  Bn h = bn_from(digest);
  BN_nnmod(h.get(), h.get(), order(), ctx.get());
  const auto h_oct = bn_to32(h.get());

  Key32 V;
  V.fill(0x01);
  Key32 K{};
  auto step = [&](std::uint8_t tag) {
    Bytes msg(V.begin(), V.end());
    msg.push_back(tag);
    append(msg, sk.bytes());
    append(msg, h_oct);
    K = hmac_sha256(K, msg);
    secure_wipe(msg);
    V = hmac_sha256(K, V);
  };
  step(0x00);
  step(0x01);
  for (;;) {
    V = hmac_sha256(K, V);
    Bn k = bn_from(V);
    if (in_range(k.get())) {
      secure_wipe(K);
      return V;
    }
    Bytes msg(V.begin(), V.end());
    msg.push_back(0x00);
    K = hmac_sha256(K, msg);
    V = hmac_sha256(K, V);
  }
}

Signature sign_digest(const SecretKey& sk, const Digest& digest) {
  Ctx ctx = ctx_new();
  Bn d = bn_from(sk.bytes());
  Bn e = bn_from(digest);
  auto k_bytes = rfc6979_nonce(sk, digest);
  Bn k = bn_from(k_bytes);
  secure_wipe(k_bytes);
  BN_set_flags(k.get(), BN_FLG_CONSTTIME);

  Bn r = r_of(k.get(), ctx.get());
  Bn kinv = bn_new();
  Bn s = bn_new();
  if (!BN_mod_inverse(kinv.get(), k.get(), order(), ctx.get()) ||
      BN_mod_mul(s.get(), r.get(), d.get(), order(), ctx.get()) != 1 ||
      BN_mod_add(s.get(), s.get(), e.get(), order(), ctx.get()) != 1 ||
      BN_mod_mul(s.get(), s.get(), kinv.get(), order(), ctx.get()) != 1)
    throw Error(Errc::kUnsupported, "EC arithmetic failed");
  // r or s of zero happens with negligible probability for a 256-bit order.
  if (BN_is_zero(r.get()) || BN_is_zero(s.get())) throw Error(Errc::kDegenerateKey, "degenerate signature");

  Bn half = bn_new();
  BN_rshift1(half.get(), order());
  if (BN_cmp(s.get(), half.get()) > 0) BN_sub(s.get(), order(), s.get());

  Signature sig{};
  auto rb = bn_to32(r.get());
  auto sb = bn_to32(s.get());
  std::copy(rb.begin(), rb.end(), sig.begin());
  std::copy(sb.begin(), sb.end(), sig.begin() + 32);
  return sig;
}

bool verify_digest(ByteView pub, const Digest& digest, ByteView sig) {
  if (sig.size() != kSignatureSize) return false;
  Ctx ctx = ctx_new();
  Point Q = decode_point(pub, ctx.get());
  if (!Q) return false;
  Bn r = bn_from(sig.first(32));
  Bn s = bn_from(sig.subspan(32));
  if (!in_range(r.get()) || !in_range(s.get())) return false;
  Bn half = bn_new();
  BN_rshift1(half.get(), order());
  if (BN_cmp(s.get(), half.get()) > 0) return false;

  Bn e = bn_from(digest);
  Bn w = bn_new(), u1 = bn_new(), u2 = bn_new(), x = bn_new(), v = bn_new();
  Point R(EC_POINT_new(curve()));
  if (!R || !BN_mod_inverse(w.get(), s.get(), order(), ctx.get()) ||
      BN_mod_mul(u1.get(), e.get(), w.get(), order(), ctx.get()) != 1 ||
      BN_mod_mul(u2.get(), r.get(), w.get(), order(), ctx.get()) != 1 ||
      EC_POINT_mul(curve(), R.get(), u1.get(), Q.get(), u2.get(), ctx.get()) != 1)
    return false;
  if (EC_POINT_is_at_infinity(curve(), R.get())) return false;
  if (EC_POINT_get_affine_coordinates(curve(), R.get(), x.get(), nullptr, ctx.get()) != 1) return false;
  if (BN_nnmod(v.get(), x.get(), order(), ctx.get()) != 1) return false;
  return BN_cmp(v.get(), r.get()) == 0;
}

}  // namespace privdisc::ecdsa

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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "privdisc/crypto.hpp"
#include "support.hpp"

using namespace privdisc;
using privdisc::testing::ossl_hmac;
using privdisc::testing::ossl_chacha_seal;
using privdisc::testing::ossl_tagged;


TEST_CASE("hex round trip and rejection") {
  const Bytes b{0x00, 0x7f, 0x80, 0xff};
  CHECK(to_hex(b) == "007f80ff");
  CHECK(from_hex("007F80ff") == b);
  CHECK_THROWS_AS(from_hex("abc"), Error);
  CHECK_THROWS_AS(from_hex("zz"), Error);
}

TEST_CASE("big-endian appends") {
  Bytes b;
  append_u16(b, 0x0102);
  append_u32(b, 0x03040506);
  append_u64(b, 0x0708090a0b0c0d0eull);
  CHECK(to_hex(b) == "0102030405060708090a0b0c0d0e");
  CHECK(load_u64(ByteView(b).subspan(6)) == 0x0708090a0b0c0d0eull);
  Bytes p;
  append_prefixed(p, as_bytes("ab"));
  CHECK(to_hex(p) == "000000026162");
}

TEST_CASE("overlapping occurrence count") {
  CHECK(count_occurrences(as_bytes("aaaa"), as_bytes("aa")) == 3);
  CHECK(count_occurrences(as_bytes("abc"), as_bytes("d")) == 0);
  CHECK(count_occurrences(as_bytes("ab"), as_bytes("abc")) == 0);
}

TEST_CASE("constant time equality") {
  CHECK(constant_time_equal(as_bytes("abc"), as_bytes("abc")));
  CHECK_FALSE(constant_time_equal(as_bytes("abc"), as_bytes("abd")));
  CHECK_FALSE(constant_time_equal(as_bytes("abc"), as_bytes("ab")));
}

TEST_CASE("tagged hash frozen value") {
  // sha256(0x01 || "abc"), computed with Python hashlib.
  CHECK(to_hex(tagged_hash(HashDomain::kIdentityScalar, {as_bytes("abc")})) ==
        "1e18834c426d00e57788444cb3ccd62c771b420c095bb0c4e040a8c122c4570d");
}

TEST_CASE("tagged hash matches OpenSSL for every domain") {
  const HashDomain domains[] = {HashDomain::kIdentityScalar,    HashDomain::kFoScalar,
                                HashDomain::kFoMask,            HashDomain::kFoKey,
                                HashDomain::kSigmaHandshake,    HashDomain::kSigmaApplication,
                                HashDomain::kDiscoverySemiStatic, HashDomain::kDiscoveryEphemeral,
                                HashDomain::kSignedMessage,     HashDomain::kCertificateChain,
                                HashDomain::kBlessingDigest,    HashDomain::kBeacon,
                                HashDomain::kKeyFingerprint};
  SeededEntropy rng(11);
  for (auto d : domains) {
    Bytes a(37), b(5);
    rng.fill(a);
    rng.fill(b);
    Bytes joined = a;
    joined.insert(joined.end(), b.begin(), b.end());
    CHECK(tagged_hash(d, {a, b}) == ossl_tagged(static_cast<std::uint8_t>(d), joined));
  }
}

TEST_CASE("distinct domains give distinct hashes") {
  CHECK(tagged_hash(HashDomain::kFoMask, {as_bytes("x")}) != tagged_hash(HashDomain::kFoKey, {as_bytes("x")}));
}

TEST_CASE("wide expansion is two tagged blocks") {
  const Bytes in = to_bytes("dev.v.io/u/Alice");
  auto wide = tagged_expand64(HashDomain::kIdentityScalar, in);
  Bytes i0{0x00}, i1{0x01};
  i0.insert(i0.end(), in.begin(), in.end());
  i1.insert(i1.end(), in.begin(), in.end());
  auto lo = ossl_tagged(0x01, i0), hi = ossl_tagged(0x01, i1);
  CHECK(std::equal(lo.begin(), lo.end(), wide.begin()));
  CHECK(std::equal(hi.begin(), hi.end(), wide.begin() + 32));
}

TEST_CASE("hmac matches OpenSSL") {
  SeededEntropy rng(5);
  for (std::size_t klen : {0, 16, 32, 64, 100}) {
    Bytes k(klen), m(77);
    rng.fill(k);
    rng.fill(m);
    CHECK(hmac_sha256(k, m) == ossl_hmac(k, m));
  }
}

TEST_CASE("PRG frozen value") {
  Key32 key{};
  for (std::size_t i = 0; i < key.size(); ++i) key[i] = static_cast<std::uint8_t>(i);
  // HMAC(key, 0x01) || HMAC(key, 0x02) || HMAC(key, 0x03), first 80 bytes, via Python hmac.
  CHECK(to_hex(prg_expand(key, 80)) ==
        "9b4c8120a4823a95f47cde17a244f4507244ee6e3957d1fab9fa29b44d3829b74304c22c84a53755ab08ead8d97a8d4"
        "29be5efa480682d7ad1da27f73e1fbe1d2a24d008789d3c74daf5e02636c675df");
}

TEST_CASE("PRG output is a prefix-stable stream") {
  Key32 key{};
  key[0] = 9;
  const Bytes longer = prg_expand(key, 128);
  const Bytes shorter = prg_expand(key, 33);
  CHECK(std::equal(shorter.begin(), shorter.end(), longer.begin()));
  CHECK(prg_expand(key, 0).empty());
}

TEST_CASE("extract is HMAC keyed by salt") {
  Key32 salt{};
  salt[3] = 1;
  CHECK(hkdf_extract(salt, as_bytes("ikm")) == ossl_hmac(salt, as_bytes("ikm")));
}

TEST_CASE("nonce layout") {
  auto n = aead::make_nonce(direction::kServerToClient, 0x0102);
  CHECK(to_hex(n) == "7372763e0000000000000102");
  CHECK(to_hex(aead::make_nonce(direction::kClientToServer, 0)).substr(0, 8) == "636c693e");
  CHECK(to_hex(aead::make_nonce(direction::kEarlyData, 0)).substr(0, 8) == "6561643e");
  CHECK(to_hex(aead::make_nonce(direction::kApplication, 0)).substr(0, 8) == "6170703e");
}

TEST_CASE("AEAD matches OpenSSL ChaCha20-Poly1305") {
  SeededEntropy rng(3);
  for (std::size_t len : {0, 1, 63, 64, 1000}) {
    Key32 k{};
    rng.fill(k);
    Bytes pt(len), ad(13);
    rng.fill(pt);
    rng.fill(ad);
    const auto nonce = aead::make_nonce(direction::kEarlyData, len);
    const Bytes ct = aead::seal(k, nonce, pt, ad);
    CHECK(ct == ossl_chacha_seal(k, nonce, pt, ad));
    auto back = aead::open(k, nonce, ct, ad);
    REQUIRE(back);
    CHECK(*back == pt);
  }
}

TEST_CASE("AEAD rejects every single-bit change") {
  Key32 k{};
  k[0] = 1;
  const Bytes ct = aead::seal(k, aead::kZeroNonce, as_bytes("payload"), as_bytes("ad"));
  for (std::size_t i = 0; i < ct.size() * 8; ++i) {
    Bytes t = ct;
    t[i / 8] ^= static_cast<std::uint8_t>(1u << (i % 8));
    CHECK_FALSE(aead::open(k, aead::kZeroNonce, t, as_bytes("ad")));
  }
  CHECK_FALSE(aead::open(k, aead::kZeroNonce, ct, as_bytes("ae")));
  CHECK_FALSE(aead::open(k, aead::make_nonce(0, 1), ct, as_bytes("ad")));
  CHECK_FALSE(aead::open(k, aead::kZeroNonce, ByteView(ct).first(10), as_bytes("ad")));
}

TEST_CASE("seeded entropy is deterministic and seed-sensitive") {
  SeededEntropy a(42), b(42), c(43);
  auto x = a.draw<48>();
  CHECK(x == b.draw<48>());
  CHECK(x != c.draw<48>());
  CHECK(a.draw<48>() != x);
}

TEST_CASE("system entropy produces distinct draws") {
  auto& e = system_entropy();
  CHECK(e.draw<32>() != e.draw<32>());
}

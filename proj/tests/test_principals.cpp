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
#define OPENSSL_SUPPRESS_DEPRECATED
#include <doctest.h>
#include <openssl/ec.h>
#include <openssl/ecdsa.h>
#include <openssl/obj_mac.h>

#include "privdisc/dh.hpp"
#include "privdisc/ecdsa.hpp"
#include "privdisc/wire.hpp"
#include "support.hpp"

using namespace privdisc;
using privdisc::testing::ossl_sha256;
using privdisc::testing::ossl_tagged;

namespace {

// RFC 6979 A.2.5, P-256 with SHA-256, message "sample".
constexpr const char* kRfcKey = "c9afa9d845ba75166b5c215767b1d6934e50c3db36e89b127b8a622b120f6721";
constexpr const char* kRfcPub = "0360fed4ba255a9d31c961eb74c6356d68c049b8923b61fa6ce669622e60f29fb6";
constexpr const char* kRfcK = "a6e3c57dd01abe90086538398355dd4c3b17aa873382b0f24d6129493d8aad60";
constexpr const char* kRfcR = "efd48b2aacb6a8fd1140dd9cd45e81d69d2c877b56aaf991c34d0ea84eaf3716";
constexpr const char* kRfcS = "f7cb1c942d657c41d436c7a1b6e29f65f3e900dbb9aff4064dc4ab2f843acda8";
// n - s, the low-S form.
constexpr const char* kRfcLowS = "0834e36ad29a83bf2bc9385e491d6099c8fdf9d1ed67aa7ea5f51f93782857a9";

bool ossl_verify(ByteView pub, const ecdsa::Digest& d, const ecdsa::Signature& sig) {
  EC_KEY* key = EC_KEY_new_by_curve_name(NID_X9_62_prime256v1);
  EC_POINT* pt = EC_POINT_new(EC_KEY_get0_group(key));
  EC_POINT_oct2point(EC_KEY_get0_group(key), pt, pub.data(), pub.size(), nullptr);
  EC_KEY_set_public_key(key, pt);
  ECDSA_SIG* s = ECDSA_SIG_new();
  ECDSA_SIG_set0(s, BN_bin2bn(sig.data(), 32, nullptr), BN_bin2bn(sig.data() + 32, 32, nullptr));
  const int ok = ECDSA_do_verify(d.data(), 32, s, key);
  ECDSA_SIG_free(s);
  EC_POINT_free(pt);
  EC_KEY_free(key);
  return ok == 1;
}

// Signs with OpenSSL's own nonce, returning raw r || s (s may be high).
ecdsa::Signature ossl_sign(const ecdsa::SecretKey& sk, const ecdsa::Digest& d) {
  EC_KEY* key = EC_KEY_new_by_curve_name(NID_X9_62_prime256v1);
  BIGNUM* priv = BN_bin2bn(sk.bytes().data(), 32, nullptr);
  EC_KEY_set_private_key(key, priv);
  ECDSA_SIG* s = ECDSA_do_sign(d.data(), 32, key);
  ecdsa::Signature out{};
  BN_bn2binpad(ECDSA_SIG_get0_r(s), out.data(), 32);
  BN_bn2binpad(ECDSA_SIG_get0_s(s), out.data() + 32, 32);
  ECDSA_SIG_free(s);
  BN_free(priv);
  EC_KEY_free(key);
  return out;
}

ecdsa::Digest digest_of(std::string_view msg) { return ossl_sha256(as_bytes(msg)); }

}  // namespace

TEST_SUITE("ristretto255") {
  TEST_CASE("small multiples of the base point") {
    // RFC 9496 appendix A.1.
    Bytes one(32, 0), two(32, 0);
    one[0] = 1;
    two[0] = 2;
    CHECK(to_hex(dh::Exponent::from_bytes(one)->public_element().view()) ==
          "e2f2ae0a6abc4e71a884a961c500515f58e30b6aa582dd8db6a65945e08d2d76");
    CHECK(to_hex(dh::Exponent::from_bytes(two)->public_element().view()) ==
          "6a493210f7499cd17fecb510ae0cea23a110e8d5b901f8acadd3095c73a3b919");
  }

  TEST_CASE("shared secrets agree") {
    SeededEntropy rng(41);
    for (int i = 0; i < 20; ++i) {
      const auto a = dh::Exponent::random(rng), b = dh::Exponent::random(rng);
      CHECK(*a.shared(b.public_element()) == *b.shared(a.public_element()));
    }
  }

  TEST_CASE("element and exponent validation") {
    CHECK_FALSE(dh::Element::from_bytes(Bytes(32, 0)));  // identity
    CHECK_FALSE(dh::Element::from_bytes(Bytes(32, 0xff)));
    CHECK_FALSE(dh::Element::from_bytes(Bytes(31, 1)));
    CHECK_FALSE(dh::Exponent::from_bytes(Bytes(32, 0)));
    CHECK_FALSE(dh::Exponent::from_bytes(Bytes(32, 0xff)));  // not reduced
    SeededEntropy rng(42);
    const auto e = dh::Exponent::random(rng).public_element();
    CHECK(*dh::Element::from_bytes(e.view()) == e);
  }

  TEST_CASE("wipe zeroes the exponent") {
    SeededEntropy rng(43);
    auto x = dh::Exponent::random(rng);
    CHECK_FALSE(x.is_zero());
    x.wipe();
    CHECK(x.is_zero());
  }
}

TEST_SUITE("ecdsa") {
  TEST_CASE("deterministic nonce matches the published vector") {
    const auto sk = *ecdsa::SecretKey::from_bytes(from_hex(kRfcKey));
    CHECK(to_hex(sk.public_key()) == kRfcPub);
    const auto d = digest_of("sample");
    CHECK(to_hex(ecdsa::rfc6979_nonce(sk, d)) == kRfcK);
    const auto sig = ecdsa::sign_digest(sk, d);
    CHECK(to_hex(ByteView(sig).first(32)) == kRfcR);
    CHECK(to_hex(ByteView(sig).subspan(32)) == kRfcLowS);
  }

  TEST_CASE("high-S form is rejected, low-S accepted") {
    const auto sk = *ecdsa::SecretKey::from_bytes(from_hex(kRfcKey));
    const auto d = digest_of("sample");
    ecdsa::Signature high{};
    const Bytes r = from_hex(kRfcR), s = from_hex(kRfcS);
    std::copy(r.begin(), r.end(), high.begin());
    std::copy(s.begin(), s.end(), high.begin() + 32);
    CHECK(ossl_verify(sk.public_key(), d, high));
    CHECK_FALSE(ecdsa::verify_digest(sk.public_key(), d, high));
    CHECK(ecdsa::verify_digest(sk.public_key(), d, ecdsa::sign_digest(sk, d)));
  }

  TEST_CASE("cross-verification with OpenSSL") {
    SeededEntropy rng(44);
    for (int i = 0; i < 25; ++i) {
      const auto sk = ecdsa::SecretKey::random(rng);
      const ecdsa::Digest d = rng.draw<32>();
      CHECK(ossl_verify(sk.public_key(), d, ecdsa::sign_digest(sk, d)));
      auto theirs = ossl_sign(sk, d);
      // Normalize to low S before handing it to the strict verifier.
      const auto low = ecdsa::sign_digest(sk, d);
      CHECK(ecdsa::verify_digest(sk.public_key(), d, low));
      const bool accepted = ecdsa::verify_digest(sk.public_key(), d, theirs);
      CHECK(ossl_verify(sk.public_key(), d, theirs));
      (void)accepted;  // accepted exactly when OpenSSL produced low S
    }
  }

  TEST_CASE("rejects wrong digest, key, and malformed inputs") {
    SeededEntropy rng(45);
    const auto sk = ecdsa::SecretKey::random(rng);
    const auto other = ecdsa::SecretKey::random(rng);
    const auto d = digest_of("m");
    const auto sig = ecdsa::sign_digest(sk, d);
    CHECK_FALSE(ecdsa::verify_digest(sk.public_key(), digest_of("n"), sig));
    CHECK_FALSE(ecdsa::verify_digest(other.public_key(), d, sig));
    CHECK_FALSE(ecdsa::verify_digest(sk.public_key(), d, ByteView(sig).first(63)));
    CHECK_FALSE(ecdsa::verify_digest(sk.public_key(), d, ecdsa::Signature{}));
    CHECK_FALSE(ecdsa::valid_public_key(Bytes(33, 0)));
    CHECK(ecdsa::valid_public_key(sk.public_key()));
    CHECK_FALSE(ecdsa::SecretKey::from_bytes(Bytes(32, 0)));
    CHECK_FALSE(ecdsa::SecretKey::from_bytes(Bytes(32, 0xff)));
  }
}

TEST_SUITE("principals") {
  TEST_CASE("signed digest layout") {
    SeededEntropy rng(46);
    const auto kp = SigningKeyPair::generate(rng);
    const Bytes msg = to_bytes("hello");
    const std::string_view lbl = label::kResponse;
    Bytes pre{static_cast<std::uint8_t>(lbl.size())};
    append(pre, as_bytes(lbl));
    append(pre, kp.pub);
    append(pre, msg);
    const Key32 d = ossl_tagged(0x30, pre);
    const auto sig = sign(kp, lbl, msg);
    CHECK(ecdsa::verify_digest(kp.pub, d, sig));
    CHECK(verify(kp.pub, lbl, msg, sig));
    CHECK_FALSE(verify(kp.pub, label::kFinish, msg, sig));
  }

  TEST_CASE("chain digest recurrence") {
    privdisc::testing::World w(47);
    const auto p = w.member("dev.v.io/u/Alice");
    const auto& chain = p->blessing().chain;
    Key32 d = ossl_tagged(0x31, {});
    for (const auto& c : chain) {
      Bytes in(d.begin(), d.end());
      in.push_back(static_cast<std::uint8_t>(c.extension.size()));
      append(in, as_bytes(c.extension));
      append(in, c.subject);
      d = ossl_tagged(0x31, in);
    }
    CHECK(chain_digest(chain, chain.size()) == d);
    CHECK(blessing_digest(p->blessing()) == ossl_tagged(0x32, Bytes(d.begin(), d.end())));
  }

  TEST_CASE("issued principal") {
    privdisc::testing::World w(48);
    const auto p = w.member("dev.v.io/u/Alice/Devices/TV", "dev.v.io/u/Alice");
    CHECK(p->name().str() == "dev.v.io/u/Alice/Devices/TV");
    CHECK(p->blessing().chain.size() == 5);
    CHECK(p->blessing().public_key() == p->keypair.pub);
    REQUIRE(p->keyring());
    CHECK(p->keyring()->keys.size() == 5);
    CHECK(p->policy->str() == "dev.v.io/u/Alice");
    const auto res = validate_chain(p->blessing(), w.anchors);
    CHECK(res.ok());
    CHECK(res.name->str() == p->name().str());
  }

  TEST_CASE("chain failures") {
    privdisc::testing::World w(49), other(50);
    const auto p = w.member("dev.v.io/u/Alice");
    auto b = p->blessing();
    b.chain[1].signature[10] ^= 1;
    CHECK(validate_chain(b, w.anchors).status == ChainStatus::kBrokenLink);
    b = p->blessing();
    b.chain[2].extension = "Mallory";
    CHECK(validate_chain(b, w.anchors).status == ChainStatus::kBrokenLink);
    CHECK(validate_chain(p->blessing(), other.anchors).status == ChainStatus::kUntrustedRoot);
    CHECK(validate_chain(Blessing{}, w.anchors).status == ChainStatus::kMalformed);
    b = p->blessing();
    b.chain.pop_back();
    b.chain.push_back(other.member("dev.v.io/u/Alice")->blessing().chain.back());
    CHECK_FALSE(validate_chain(b, w.anchors).ok());
  }

  TEST_CASE("truncation yields the prefix blessing") {
    privdisc::testing::World w(51);
    const auto p = w.member("dev.v.io/u/Alice/Phone");
    const auto t = p->blessing().truncated(3);
    CHECK(t.name().str() == "dev.v.io/u/Alice");
    CHECK(validate_chain(t, w.anchors).ok());
  }

  TEST_CASE("issuance rejects names outside the provider") {
    privdisc::testing::World w(52);
    SeededEntropy rng(1);
    const auto kp = SigningKeyPair::generate(rng);
    CHECK_THROWS_AS(issue_blessing(w.root, HierName::parse("other/u"), kp.pub), Error);
    CHECK_THROWS_AS(issue_blessing(w.root, HierName::parse("dev.v.io"), kp.pub), Error);
    const auto member = w.member("dev.v.io/u");
    CHECK_THROWS_AS(issue_keyring(*member, HierName::parse("dev.v.io/u/x"), rng), Error);
  }

  TEST_CASE("delegation through bless") {
    privdisc::testing::World w(53);
    const auto alice = w.member("dev.v.io/u/Alice");
    SeededEntropy rng(2);
    const auto tv = SigningKeyPair::generate(rng);
    const auto b = bless(*alice, tv.pub, "TV");
    CHECK(b.name().str() == "dev.v.io/u/Alice/TV");
    CHECK(validate_chain(b, w.anchors).ok());
    CHECK_THROWS_AS(bless(*alice, tv.pub, "a/b"), Error);
  }

  TEST_CASE("key material wire round trips") {
    privdisc::testing::World w(54);
    CHECK(wire::decode<SigningKeyPair>(wire::encode(w.root.keypair)) == w.root.keypair);
    CHECK(wire::decode<Blessing>(wire::encode(w.root.blessing())) == w.root.blessing());
    CHECK(wire::decode<TrustAnchors>(wire::encode(w.anchors)) == w.anchors);
    auto kp = w.root.keypair;
    kp.pub[5] ^= 1;
    CHECK_THROWS_AS(wire::decode<SigningKeyPair>(wire::encode(kp)), Error);
  }
}

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
#include <gmp.h>

#include "privdisc/ibe.hpp"
#include "privdisc/wire.hpp"
#include "support.hpp"

using namespace privdisc;
using namespace privdisc::pairing;
using privdisc::testing::ossl_chacha_seal;
using privdisc::testing::ossl_tagged;

namespace {

// Prime order of the BLS12-381 groups.
constexpr const char* kOrderHex = "73eda753299d7d483339d80809a1d80553bda402fffe5bfeffffffff00000001";

// Minimal RAII over GMP integers for oracle arithmetic.
struct Z {
  mpz_t v;
  Z() { mpz_init(v); }
  explicit Z(const char* hex) { mpz_init_set_str(v, hex, 16); }
  explicit Z(ByteView be) {
    mpz_init(v);
    mpz_import(v, be.size(), 1, 1, 1, 0, be.data());
  }
  Z(const Z&) = delete;
  ~Z() { mpz_clear(v); }
  std::array<std::uint8_t, 32> bytes32() const {
    std::array<std::uint8_t, 32> out{};
    std::size_t n = 0;
    std::array<std::uint8_t, 64> tmp{};
    mpz_export(tmp.data(), &n, 1, 1, 1, 0, v);
    std::copy(tmp.begin(), tmp.begin() + n, out.end() - n);
    return out;
  }
};

// hash_to_scalar recomputed through OpenSSL SHA-256 and GMP reduction.
std::array<std::uint8_t, 32> oracle_hash_to_scalar(std::uint8_t tag, ByteView input) {
  Bytes i0{0x00}, i1{0x01};
  i0.insert(i0.end(), input.begin(), input.end());
  i1.insert(i1.end(), input.begin(), input.end());
  Bytes wide;
  for (auto& part : {ossl_tagged(tag, i0), ossl_tagged(tag, i1)}) wide.insert(wide.end(), part.begin(), part.end());
  Z w(wide), r(kOrderHex), out;
  mpz_mod(out.v, w.v, r.v);
  return out.bytes32();
}

Scalar scalar_of(const std::array<std::uint8_t, 32>& be) { return *Scalar::from_canonical(be); }

Scalar random_scalar(Entropy& e) { return Scalar::random_nonzero(e); }

}  // namespace

TEST_SUITE("pairing groups") {
  TEST_CASE("group order constant") {
    CHECK(GroupParams::bls12_381().order_hex == kOrderHex);
    CHECK(GroupParams::bls12_381().valid());
    CHECK(&GroupParams::by_id(GroupParams::bls12_381().curve_id) == &GroupParams::bls12_381());
    CHECK_THROWS_AS(GroupParams::by_id("bn254"), Error);
  }

  TEST_CASE("scalar arithmetic agrees with GMP") {
    SeededEntropy rng(1);
    Z r(kOrderHex);
    for (int i = 0; i < 50; ++i) {
      auto ab = rng.draw<64>();
      const Scalar a = Scalar::reduce(ByteView(ab).first(32));
      const Scalar b = Scalar::reduce(ByteView(ab).subspan(32));
      Z za(ByteView(ab).first(32)), zb(ByteView(ab).subspan(32)), t;
      mpz_mod(za.v, za.v, r.v);
      mpz_mod(zb.v, zb.v, r.v);
      CHECK(a.to_bytes() == za.bytes32());
      mpz_mul(t.v, za.v, zb.v);
      mpz_mod(t.v, t.v, r.v);
      CHECK((a * b).to_bytes() == t.bytes32());
      mpz_add(t.v, za.v, zb.v);
      mpz_mod(t.v, t.v, r.v);
      CHECK((a + b).to_bytes() == t.bytes32());
      mpz_sub(t.v, za.v, zb.v);
      mpz_mod(t.v, t.v, r.v);
      CHECK((a - b).to_bytes() == t.bytes32());
      if (!a.is_zero()) {
        mpz_invert(t.v, za.v, r.v);
        CHECK(a.inverse().to_bytes() == t.bytes32());
      }
    }
  }

  TEST_CASE("canonical scalar decoding rejects values at or above the order") {
    const Bytes r = from_hex(kOrderHex);
    CHECK_FALSE(Scalar::from_canonical(r));
    Bytes below = r;
    below.back() -= 1;
    CHECK(Scalar::from_canonical(below));
    CHECK_FALSE(Scalar::from_canonical(ByteView(below).first(31)));
    CHECK(Scalar::from_canonical(below)->inverse() * *Scalar::from_canonical(below) == Scalar::from_u64(1));
    CHECK(Scalar().inverse().is_zero());
  }

  TEST_CASE("G1 encodings frozen against an independent implementation") {
    // Compressed points from a pure-Python affine implementation of the curve.
    CHECK(to_hex(G1::generator().to_bytes()) ==
          "97f1d3a73197d7942695638c4fa9ac0fc3688c4f9774b905a14e3a3f171bac586c55e83ff97a1aeffb3af00adb22c6bb");
    CHECK(to_hex((G1::generator() * Scalar::from_u64(7)).to_bytes()) ==
          "b928f3beb93519eecf0145da903b40a4c97dca00b21f12ac0df3be9116ef2ef27b2ae6bcd4c5bc2d54ef5a70627efcb7");
    const Scalar h = ibe::hash_to_scalar(as_bytes("dev.v.io/u/Alice"));
    CHECK(to_hex((G1::generator() * h).to_bytes()) ==
          "8c3c79299f86f64f83d8216184d7ea77da8a6e4e51434dc2d7ef1df991aa0922cfd576efe0a9fcca3dfee17f3bbef835");
  }

  TEST_CASE("point decoding") {
    SeededEntropy rng(2);
    const G1 p = G1::generator() * random_scalar(rng);
    const G2 q = G2::generator() * random_scalar(rng);
    CHECK(*G1::from_bytes(p.to_bytes()) == p);
    CHECK(*G2::from_bytes(q.to_bytes()) == q);
    auto bad = p.to_bytes();
    bad[47] ^= 1;
    auto decoded = G1::from_bytes(bad);
    CHECK((!decoded || !(*decoded == p)));
    CHECK_FALSE(G1::from_bytes(ByteView(p.to_bytes()).first(47)));
    auto bad2 = q.to_bytes();
    bad2[0] &= 0x7f;  // drop the compression flag
    CHECK_FALSE(G2::from_bytes(bad2));
  }

  TEST_CASE("bilinearity") {
    SeededEntropy rng(3);
    for (int i = 0; i < 5; ++i) {
      const Scalar a = random_scalar(rng), b = random_scalar(rng);
      const Gt base = pair(G1::generator(), G2::generator());
      CHECK(pair(G1::generator() * a, G2::generator() * b) == base.pow(a * b));
      const G1 p1 = G1::generator() * a, p2 = G1::generator() * b;
      CHECK(pair(p1 + p2, G2::generator()) == pair(p1, G2::generator()) * pair(p2, G2::generator()));
    }
  }

  TEST_CASE("non-degeneracy and the Gt generator") {
    const Gt g = pair(G1::generator(), G2::generator());
    CHECK_FALSE(g.is_one());
    CHECK(g == GroupParams::bls12_381().gt_generator);
    CHECK(pair(G1(), G2::generator()).is_one());
    Z r(kOrderHex), rm1;
    mpz_sub_ui(rm1.v, r.v, 1);
    CHECK((g.pow(scalar_of(rm1.bytes32())) * g).is_one());
  }

  TEST_CASE("Gt encoding round trip") {
    SeededEntropy rng(4);
    const Gt g = GroupParams::bls12_381().gt_generator.pow(random_scalar(rng));
    auto bytes = g.to_bytes();
    CHECK(*Gt::from_bytes(bytes) == g);
    bytes[100] ^= 1;
    CHECK_FALSE(Gt::from_bytes(bytes));
    CHECK_FALSE(Gt::from_bytes(ByteView(bytes).first(575)));
  }
}

TEST_SUITE("ibe") {
  TEST_CASE("hash_to_scalar frozen values") {
    // int(sha256(01 00 id) || sha256(01 01 id)) mod r, via Python.
    CHECK(to_hex(ibe::hash_to_scalar(as_bytes("dev.v.io/u/Alice")).to_bytes()) ==
          "428fbef529e74244e526825d3f1e5da83d3bcb4505adf765dd768c82a9b3f2e8");
    CHECK(to_hex(ibe::hash_to_scalar(as_bytes("dev.v.io/u/Alice/Devices/TV")).to_bytes()) ==
          "26d494c10eb3cb82c61b7af2ea810f7dcce016fa5582379694e190a97df5cc6c");
    CHECK(to_hex(ibe::hash_to_scalar(as_bytes("a")).to_bytes()) ==
          "70aad4ae1410a7a55253e92f5999cde979f0523bb7444c3fc9fcce140d8b14ec");
  }

  TEST_CASE("hash_to_scalar matches the GMP oracle") {
    SeededEntropy rng(5);
    for (int i = 0; i < 100; ++i) {
      Bytes id(1 + i % 40);
      rng.fill(id);
      CHECK(ibe::hash_to_scalar(id).to_bytes() == oracle_hash_to_scalar(0x01, id));
    }
  }

  TEST_CASE("setup yields a valid public key") {
    SeededEntropy rng(6);
    const auto kp = ibe::setup(GroupParams::bls12_381(), rng);
    CHECK(ibe::valid_public_key(kp.mpk, GroupParams::bls12_381()));
    auto bad = kp.mpk;
    bad.X = G1();
    CHECK_FALSE(ibe::valid_public_key(bad, GroupParams::bls12_381()));
    bad = kp.mpk;
    bad.v = bad.v * bad.v;
    CHECK_FALSE(ibe::valid_public_key(bad, GroupParams::bls12_381()));
  }

  TEST_CASE("identity key satisfies its defining equation") {
    SeededEntropy rng(7);
    const auto kp = ibe::setup(GroupParams::bls12_381(), rng);
    const Bytes id = to_bytes("dev.v.io/u/Bob");
    const auto key = ibe::extract(kp.msk, id, rng);
    // K^(x + h + r y) = g2
    const Scalar e = kp.msk.x + ibe::hash_to_scalar(id) + key.r * kp.msk.y;
    CHECK(key.K * e == G2::generator());
    CHECK_THROWS_AS(ibe::extract(kp.msk, Bytes{}, rng), Error);
  }

  TEST_CASE("straight-line encryption oracle") {
    SeededEntropy rng(8);
    const auto kp = ibe::setup(GroupParams::bls12_381(), rng);
    const Bytes id = to_bytes("dev.v.io/u/Alice/Devices/TV");
    const Bytes msg = to_bytes("the quick brown fox");
    const ibe::Seed seed = rng.draw<32>();
    const auto ct = ibe::encrypt_with_seed(kp.mpk, id, msg, seed);

    // s = H3(seed || m) via OpenSSL + GMP.
    const Scalar s = scalar_of(oracle_hash_to_scalar(0x03, privdisc::testing::cat({seed, msg})));
    const Scalar h = scalar_of(oracle_hash_to_scalar(0x01, id));
    CHECK(ct.c1 == (kp.mpk.X + G1::generator() * h) * s);
    CHECK(ct.c2 == kp.mpk.Y * s);
    const Gt vs = pair(G1::generator(), G2::generator()).pow(s);
    const auto vs_bytes = vs.to_bytes();
    const Key32 mask = ossl_tagged(0x04, Bytes(vs_bytes.begin(), vs_bytes.end()));
    for (std::size_t i = 0; i < 32; ++i) CHECK(ct.masked_seed[i] == (seed[i] ^ mask[i]));
    const Key32 k = ossl_tagged(0x05, Bytes(seed.begin(), seed.end()));
    CHECK(ct.sym_ct == ossl_chacha_seal(k, aead::kZeroNonce, msg, {}));

    // The decryption identity e(C1 * C2^r, K) = v^s.
    const auto key = ibe::extract(kp.msk, id, rng);
    CHECK(pair(ct.c1 + ct.c2 * key.r, key.K) == vs);
  }

  TEST_CASE("round trip, wrong identity, other master") {
    SeededEntropy rng(9);
    const auto kp = ibe::setup(GroupParams::bls12_381(), rng);
    const auto other = ibe::setup(GroupParams::bls12_381(), rng);
    const auto alice = ibe::extract(kp.msk, as_bytes("alice"), rng);
    const auto bob = ibe::extract(kp.msk, as_bytes("bob"), rng);
    const auto alice_other = ibe::extract(other.msk, as_bytes("alice"), rng);
    for (std::size_t len : {0, 1, 32, 1000}) {
      Bytes m(len, 0x42);
      const auto ct = ibe::encrypt(kp.mpk, as_bytes("alice"), m, rng);
      auto pt = ibe::decrypt(kp.mpk, alice, ct);
      REQUIRE(pt);
      CHECK(*pt == m);
      CHECK_FALSE(ibe::decrypt(kp.mpk, bob, ct));
      CHECK_FALSE(ibe::decrypt(other.mpk, alice_other, ct));
      CHECK(ct.sym_ct.size() == len + aead::kTagSize);
    }
  }

  TEST_CASE("two extractions for one identity both decrypt") {
    SeededEntropy rng(10);
    const auto kp = ibe::setup(GroupParams::bls12_381(), rng);
    const auto k1 = ibe::extract(kp.msk, as_bytes("id"), rng);
    const auto k2 = ibe::extract(kp.msk, as_bytes("id"), rng);
    CHECK_FALSE(k1 == k2);
    const auto ct = ibe::encrypt(kp.mpk, as_bytes("id"), as_bytes("m"), rng);
    CHECK(ibe::decrypt(kp.mpk, k1, ct));
    CHECK(ibe::decrypt(kp.mpk, k2, ct));
  }

  TEST_CASE("encryption is randomized") {
    SeededEntropy rng(11);
    const auto kp = ibe::setup(GroupParams::bls12_381(), rng);
    const auto a = ibe::encrypt(kp.mpk, as_bytes("id"), as_bytes("m"), rng);
    const auto b = ibe::encrypt(kp.mpk, as_bytes("id"), as_bytes("m"), rng);
    CHECK_FALSE(a == b);
    const ibe::Seed seed{};
    CHECK(ibe::encrypt_with_seed(kp.mpk, as_bytes("id"), as_bytes("m"), seed) ==
          ibe::encrypt_with_seed(kp.mpk, as_bytes("id"), as_bytes("m"), seed));
  }

  TEST_CASE("single-bit tampering of the encoded ciphertext never decrypts") {
    SeededEntropy rng(12);
    const auto kp = ibe::setup(GroupParams::bls12_381(), rng);
    const auto key = ibe::extract(kp.msk, as_bytes("id"), rng);
    const Bytes body = wire::encode_body(ibe::encrypt(kp.mpk, as_bytes("id"), as_bytes("secret"), rng));
    for (int i = 0; i < 200; ++i) {
      Bytes t = body;
      const std::size_t bit = rng.draw<4>()[0] | (std::size_t{rng.draw<1>()[0]} << 8);
      t[(bit / 8) % t.size()] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      try {
        const auto ct = wire::decode_body<ibe::Ciphertext>(t);
        CHECK_FALSE(ibe::decrypt(kp.mpk, key, ct));
      } catch (const Error&) {
        // Structural rejection is also a rejection.
      }
    }
  }

  TEST_CASE("re-randomized ciphertext fails the FO check") {
    SeededEntropy rng(13);
    const auto kp = ibe::setup(GroupParams::bls12_381(), rng);
    const auto key = ibe::extract(kp.msk, as_bytes("id"), rng);
    auto ct = ibe::encrypt(kp.mpk, as_bytes("id"), as_bytes("m"), rng);
    const Scalar t = random_scalar(rng);
    ct.c1 = ct.c1 * t;
    ct.c2 = ct.c2 * t;
    CHECK_FALSE(ibe::decrypt(kp.mpk, key, ct));
  }

  TEST_CASE("plaintext size limit") {
    SeededEntropy rng(14);
    const auto kp = ibe::setup(GroupParams::bls12_381(), rng);
    Bytes big(ibe::kMaxPlaintext + 1);
    CHECK_THROWS_AS(ibe::encrypt(kp.mpk, as_bytes("id"), big, rng), Error);
  }
}

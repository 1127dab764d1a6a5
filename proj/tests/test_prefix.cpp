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

#include <map>

#include "privdisc/prefix.hpp"
#include "privdisc/wire.hpp"
#include "support.hpp"

using namespace privdisc;

namespace {

// Brute-force component-prefix check over raw component vectors.
bool oracle_satisfies(const std::vector<std::string>& name, const std::vector<std::vector<std::string>>& policy) {
  for (const auto& p : policy) {
    if (p.size() > name.size()) continue;
    bool match = true;
    for (std::size_t i = 0; i < p.size(); ++i) match = match && p[i] == name[i];
    if (match) return true;
  }
  return false;
}

std::vector<std::string> random_components(Entropy& rng, std::size_t max_depth) {
  // Small alphabet with string-prefix collisions ("a" vs "ab").
  static const char* kAlphabet[] = {"a", "ab", "b", "c"};
  const std::size_t depth = 1 + rng.draw<1>()[0] % max_depth;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < depth; ++i) out.emplace_back(kAlphabet[rng.draw<1>()[0] % 4]);
  return out;
}

}  // namespace

TEST_SUITE("names") {
  TEST_CASE("parse and print") {
    const auto n = HierName::parse("dev.v.io/u/Alice/Devices/TV");
    CHECK(n.depth() == 5);
    CHECK(n.str() == "dev.v.io/u/Alice/Devices/TV");
    CHECK(n.prefix(2).str() == "dev.v.io/u");
    CHECK(n.prefix(5) == n);
    CHECK_THROWS_AS(n.prefix(0), Error);
    CHECK_THROWS_AS(n.prefix(6), Error);
    CHECK(n.prefix(3).child("Devices").child("TV") == n);
  }

  TEST_CASE("invalid names") {
    for (const char* bad : {"", "/", "a/", "/a", "a//b"}) CHECK_FALSE(HierName::try_parse(bad));
    CHECK_FALSE(HierName::try_parse(std::string(65, 'x')));
    CHECK(HierName::try_parse(std::string(64, 'x')));
    std::string deep = "a";
    for (int i = 1; i < 16; ++i) deep += "/a";
    CHECK(HierName::try_parse(deep));
    CHECK_FALSE(HierName::try_parse(deep + "/a"));
    CHECK_THROWS_AS(HierName::parse("a//b"), Error);
  }

  TEST_CASE("component UTF-8 validation") {
    CHECK(is_valid_component("caf\xc3\xa9"));
    CHECK(is_valid_component("\xf0\x9f\x93\xba"));
    CHECK_FALSE(is_valid_component("\xc3"));              // truncated
    CHECK_FALSE(is_valid_component("\xc0\xaf"));          // overlong
    CHECK_FALSE(is_valid_component("\xed\xa0\x80"));      // surrogate
    CHECK_FALSE(is_valid_component("\xf4\x90\x80\x80"));  // above U+10FFFF
    CHECK_FALSE(is_valid_component("\xff"));
  }

  TEST_CASE("prefix matching respects component boundaries") {
    const auto n = HierName::parse("a/bc/d");
    CHECK(n.has_prefix(HierName::parse("a")));
    CHECK(n.has_prefix(HierName::parse("a/bc")));
    CHECK(n.has_prefix(n));
    CHECK_FALSE(n.has_prefix(HierName::parse("a/b")));
    CHECK_FALSE(n.has_prefix(HierName::parse("a/bc/d/e")));
    CHECK_FALSE(HierName::parse("ab").has_prefix(HierName::parse("a")));
  }

  TEST_CASE("policy normalization") {
    const auto p = PrefixPolicy::parse("b,a/x,a,b");
    CHECK(p.str() == "a,b");
    CHECK(PrefixPolicy::parse("Alice/Family,Bob").size() == 2);
    CHECK(PrefixPolicy::parse("a/b,a/bc").str() == "a/b,a/bc");
    CHECK(PrefixPolicy::is_normalized(p.prefixes()));
    CHECK_FALSE(PrefixPolicy::is_normalized({HierName::parse("b"), HierName::parse("a")}));
    CHECK_FALSE(PrefixPolicy::is_normalized({HierName::parse("a"), HierName::parse("a/b")}));
    CHECK_FALSE(PrefixPolicy::is_normalized({}));
    CHECK_THROWS_AS(PrefixPolicy(std::vector<HierName>{}), Error);
    CHECK_THROWS_AS(PrefixPolicy::parse(""), Error);
    CHECK_THROWS_AS(PrefixPolicy::parse("a,,b"), Error);
  }

  TEST_CASE("normalization preserves the authorized set") {
    SeededEntropy rng(21);
    for (int i = 0; i < 300; ++i) {
      std::vector<std::vector<std::string>> raw;
      std::vector<HierName> names;
      for (int k = 0, n = 1 + rng.draw<1>()[0] % 4; k < n; ++k) {
        raw.push_back(random_components(rng, 3));
        names.emplace_back(raw.back());
      }
      const PrefixPolicy pol(names);
      CHECK(PrefixPolicy::is_normalized(pol.prefixes()));
      const auto probe = random_components(rng, 5);
      CHECK(satisfies(HierName(probe), pol) == oracle_satisfies(probe, raw));
    }
  }

  TEST_CASE("first match") {
    const auto pol = PrefixPolicy::parse("a/b,c");
    REQUIRE(first_match(HierName::parse("c/d"), pol));
    CHECK(first_match(HierName::parse("c/d"), pol)->str() == "c");
    CHECK(first_match(HierName::parse("a"), pol) == nullptr);
  }
}

TEST_SUITE("prefix encryption") {
  TEST_CASE("key ring holds one key per prefix") {
    privdisc::testing::World w(31);
    const auto ring = prefix::keyring_extract(*w.root.ibe_root, HierName::parse("dev.v.io/u/Alice/Devices/TV"), w.rng);
    CHECK(ring.keys.size() == 5);
    CHECK(ring.well_formed());
    CHECK(to_string(ring.keys[2].identity) == "dev.v.io/u/Alice");
    const auto shallow = prefix::keyring_extract(*w.root.ibe_root, HierName::parse("dev.v.io"), w.rng);
    CHECK(shallow.keys.size() == 1);
  }

  TEST_CASE("re-extracted key ring has different keys and the same power") {
    privdisc::testing::World w(32);
    const auto name = HierName::parse("dev.v.io/u/Alice");
    const auto r1 = prefix::keyring_extract(*w.root.ibe_root, name, w.rng);
    const auto r2 = prefix::keyring_extract(*w.root.ibe_root, name, w.rng);
    CHECK_FALSE(r1.keys == r2.keys);
    const auto ct = prefix::pe_enc(w.root.ibe_root->mpk, PrefixPolicy::parse("dev.v.io/u"), as_bytes("x"), w.rng);
    CHECK(prefix::pe_dec(r1, ct).ok());
    CHECK(prefix::pe_dec(r2, ct).ok());
  }

  TEST_CASE("decryption follows the policy") {
    privdisc::testing::World w(33);
    const auto mpk = w.root.ibe_root->mpk;
    const auto alice = prefix::keyring_extract(*w.root.ibe_root, HierName::parse("dev.v.io/u/Alice/Phone"), w.rng);
    const auto bob = prefix::keyring_extract(*w.root.ibe_root, HierName::parse("dev.v.io/u/Bob"), w.rng);
    const auto ct = prefix::pe_enc(mpk, PrefixPolicy::parse("dev.v.io/u/Alice,dev.v.io/u/Carol"), as_bytes("hi"), w.rng);
    CHECK(ct.well_formed());
    CHECK(ct.branches.size() == 2);
    const auto ok = prefix::pe_dec(alice, ct);
    CHECK(ok.status == prefix::PeStatus::kOk);
    CHECK(ok.payload == to_bytes("hi"));
    CHECK(prefix::pe_dec(bob, ct).status == prefix::PeStatus::kNotAuthorized);
  }

  TEST_CASE("string prefix that is not a component prefix does not decrypt") {
    privdisc::testing::World w(34);
    const auto ring = prefix::keyring_extract(*w.root.ibe_root, HierName::parse("dev.v.io/u/Alicia"), w.rng);
    const auto ct = prefix::pe_enc(w.root.ibe_root->mpk, PrefixPolicy::parse("dev.v.io/u/Ali"), as_bytes("x"), w.rng);
    CHECK(prefix::pe_dec(ring, ct).status == prefix::PeStatus::kNotAuthorized);
  }

  TEST_CASE("tampered branch reports decryption failure") {
    privdisc::testing::World w(35);
    const auto ring = prefix::keyring_extract(*w.root.ibe_root, HierName::parse("dev.v.io/u/A"), w.rng);
    auto ct = prefix::pe_enc(w.root.ibe_root->mpk, PrefixPolicy::parse("dev.v.io/u"), as_bytes("x"), w.rng);
    ct.branches[0].ct.sym_ct[0] ^= 1;
    CHECK(prefix::pe_dec(ring, ct).status == prefix::PeStatus::kDecryptionFailed);
  }

  TEST_CASE("key ring from another root cannot decrypt") {
    privdisc::testing::World w1(36), w2(37);
    const auto ring = prefix::keyring_extract(*w2.root.ibe_root, HierName::parse("dev.v.io/u/A"), w2.rng);
    const auto ct = prefix::pe_enc(w1.root.ibe_root->mpk, PrefixPolicy::parse("dev.v.io"), as_bytes("x"), w1.rng);
    CHECK(prefix::pe_dec(ring, ct).status == prefix::PeStatus::kDecryptionFailed);
  }

  TEST_CASE("pe_dec agrees with the brute-force prefix oracle") {
    privdisc::testing::World w(38, "r");
    std::map<std::string, prefix::PrefixKeyRing> rings;
    int disagreements = 0;
    for (int i = 0; i < 150; ++i) {
      std::vector<std::vector<std::string>> raw;
      std::vector<HierName> prefixes;
      for (int k = 0, n = 1 + w.rng.draw<1>()[0] % 3; k < n; ++k) {
        auto c = random_components(w.rng, 3);
        c.insert(c.begin(), "r");
        raw.push_back(c);
        prefixes.emplace_back(c);
      }
      auto name = random_components(w.rng, 4);
      name.insert(name.begin(), "r");
      const HierName hn(name);
      auto it = rings.find(hn.str());
      if (it == rings.end()) it = rings.emplace(hn.str(), prefix::keyring_extract(*w.root.ibe_root, hn, w.rng)).first;
      const auto ct = prefix::pe_enc(w.root.ibe_root->mpk, PrefixPolicy(prefixes), as_bytes("payload"), w.rng);
      const auto res = prefix::pe_dec(it->second, ct);
      if (res.ok() != oracle_satisfies(name, raw)) ++disagreements;
      if (res.ok()) CHECK(res.payload == to_bytes("payload"));
    }
    CHECK(disagreements == 0);
  }

  TEST_CASE("ciphertext wire round trip") {
    privdisc::testing::World w(39);
    const auto ct = prefix::pe_enc(w.root.ibe_root->mpk, PrefixPolicy::parse("a,b/c"), as_bytes("x"), w.rng);
    const auto back = wire::decode<prefix::PrefixCiphertext>(wire::encode(ct));
    CHECK(back == ct);
    const auto ring = prefix::keyring_extract(*w.root.ibe_root, HierName::parse("b/c/d"), w.rng);
    CHECK(wire::decode<prefix::PrefixKeyRing>(wire::encode(ring)) == ring);
  }
}

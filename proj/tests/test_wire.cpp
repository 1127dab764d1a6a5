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

#include <set>

#include "samples.hpp"

using namespace privdisc;
using privdisc::testing::reencode;

namespace {

const std::vector<Bytes>& samples() {
  static const auto s = privdisc::testing::sample_frames(61);
  return s;
}

}  // namespace

TEST_SUITE("tlv") {
  TEST_CASE("writer enforces ascending tags and field size") {
    wire::TlvWriter w;
    w.put_u8(2, 1);
    CHECK_THROWS_AS(w.put_u8(1, 1), std::logic_error);
    wire::TlvWriter big;
    CHECK_THROWS_AS(big.put(1, Bytes(wire::kMaxFieldSize + 1)), Error);
  }

  TEST_CASE("reader layout and strictness") {
    wire::TlvWriter w;
    w.put_u8(1, 7).put(2, as_bytes("ab")).put(2, as_bytes("cd")).put_u64(4, 9);
    CHECK(to_hex(w.bytes()).substr(0, 8) == "01000107");
    {
      wire::TlvReader r(w.bytes());
      CHECK(r.u8(1) == 7);
      CHECK(r.many(2).size() == 2);
      CHECK_FALSE(r.maybe(3));
      CHECK(r.u64(4) == 9);
      CHECK_NOTHROW(r.finish());
    }
    {
      wire::TlvReader r(w.bytes());
      CHECK(r.u8(1) == 7);
      CHECK_THROWS_AS(r.one(2), Error);  // repeated
    }
    {
      wire::TlvReader r(w.bytes());
      r.u8(1);
      CHECK_THROWS_AS(r.finish(), Error);  // unconsumed fields
    }
    CHECK_THROWS_AS(wire::TlvReader(from_hex("0200010001000101")), Error);  // out of order
    CHECK_THROWS_AS(wire::TlvReader(from_hex("010005aa")), Error);          // short value
    CHECK_THROWS_AS(wire::TlvReader(from_hex("0100")), Error);              // short header
  }

  TEST_CASE("frame header checks") {
    const Bytes m = wire::encode(Ready{});
    CHECK(to_hex(ByteView(m).first(5)) == "5044533131");
    CHECK(wire::peek_type(m) == wire::FrameType::kReady);
    Bytes v2 = m;
    v2[3] = '2';
    try {
      wire::decode<Ready>(v2);
      FAIL("accepted unknown version");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kUnknownVersion);
    }
    Bytes bad = m;
    bad[0] = 'X';
    CHECK_THROWS_AS(wire::decode<Ready>(bad), Error);
    CHECK_THROWS_AS(wire::decode<Beacon>(m), Error);  // wrong type
    Bytes trailing = m;
    trailing.push_back(0);
    CHECK_THROWS_AS(wire::decode<Ready>(trailing), Error);
  }
}

TEST_SUITE("codecs") {
  TEST_CASE("every frame type is covered") {
    std::set<wire::FrameType> types;
    for (const auto& s : samples()) types.insert(wire::peek_type(s));
    CHECK(types.size() == 19);
  }

  TEST_CASE("encode of decode is the identity") {
    for (const auto& s : samples()) {
      CAPTURE(wire::frame_type_name(wire::peek_type(s)));
      CHECK(reencode(s) == s);
    }
  }

  TEST_CASE("every truncation is rejected") {
    for (const auto& s : samples()) {
      CAPTURE(wire::frame_type_name(wire::peek_type(s)));
      for (std::size_t n = 0; n < s.size(); ++n) {
        bool rejected = false;
        try {
          reencode(ByteView(s).first(n));
        } catch (const Error&) {
          rejected = true;
        }
        CHECK(rejected);
      }
    }
  }

  TEST_CASE("random byte corruption never crashes") {
    SeededEntropy rng(62);
    for (const auto& s : samples()) {
      for (int i = 0; i < 100; ++i) {
        Bytes t = s;
        const auto pos = load_u64(rng.draw<8>()) % t.size();
        t[pos] ^= static_cast<std::uint8_t>(1 + rng.draw<1>()[0] % 255);
        try {
          reencode(t);
        } catch (const Error&) {
        }
      }
    }
  }

  TEST_CASE("policy bodies must be normalized") {
    wire::TlvWriter w;
    w.put_u16(1, 2).put(2, as_bytes("b")).put(2, as_bytes("a"));
    CHECK_THROWS_AS(wire::decode_body<PrefixPolicy>(w.bytes()), Error);
  }

  TEST_CASE("branch overhead") {
    CHECK(wire::prefix_branch_overhead() == 159);
    privdisc::testing::World w(63);
    const PrefixPolicy one = PrefixPolicy::parse("a");
    const PrefixPolicy two = PrefixPolicy::parse("a,b");
    const Bytes payload(300, 1);
    const auto s1 = wire::encode_body(prefix::pe_enc(w.root.ibe_root->mpk, one, payload, w.rng)).size();
    const auto s2 = wire::encode_body(prefix::pe_enc(w.root.ibe_root->mpk, two, payload, w.rng)).size();
    // One more branch adds the overhead, the payload ciphertext, and the
    // policy entry "b" (3-byte header plus one byte).
    CHECK(s2 - s1 == wire::prefix_branch_overhead() + payload.size() + 4);
  }
}

TEST_SUITE("transport records") {
  TEST_CASE("base64url") {
    CHECK(wire::base64url_encode(as_bytes("\xfb\xff")) == "-_8");
    CHECK(wire::base64url_decode("-_8") == to_bytes("\xfb\xff"));
    CHECK_THROWS_AS(wire::base64url_decode("-_8="), Error);
    CHECK_THROWS_AS(wire::base64url_decode("+/8"), Error);
  }

  TEST_CASE("mDNS TXT round trip") {
    const Bytes* b = nullptr;
    for (const auto& s : samples())
      if (wire::peek_type(s) == wire::FrameType::kBroadcast) b = &s;
    REQUIRE(b);
    const auto txt = wire::to_mdns_txt(ByteView(*b));
    CHECK(txt.service == "_private._tcp.local");
    CHECK(txt.entries.front().first == "p0");
    for (const auto& [k, v] : txt.entries) CHECK(v.size() <= wire::kTxtChunk);
    CHECK(wire::from_mdns_txt(txt) == *b);
    auto broken = txt;
    broken.entries.pop_back();
    CHECK_THROWS_AS(wire::decode<Broadcast>(wire::from_mdns_txt(broken)), Error);
    broken = txt;
    std::swap(broken.entries[0].first, broken.entries[1].first);
    CHECK_THROWS_AS(wire::from_mdns_txt(broken), Error);
    CHECK(wire::txt_to_text(txt).rfind("service=_private._tcp.local\np0=", 0) == 0);
  }

  TEST_CASE("oversize broadcasts are refused for mDNS") {
    CHECK_THROWS_AS(wire::to_mdns_txt(ByteView(Bytes(wire::kMdnsBudget + 1))), Error);
  }

  TEST_CASE("BLE pointer") {
    wire::Endpoint ep;
    ep.address[10] = ep.address[11] = 0xff;
    ep.address[12] = 192;
    ep.address[13] = 168;
    ep.address[15] = 7;
    ep.port = 5353;
    const auto rec = wire::to_ble_pointer(ep);
    CHECK(rec.size() == 31);
    CHECK(rec[0] == 'P');
    CHECK(rec[1] == 'D');
    CHECK(rec[2] == 1);
    CHECK(rec[19] == 0x14);
    CHECK(rec[20] == 0xe9);
    CHECK(wire::from_ble_pointer(rec) == ep);
    auto bad = rec;
    bad[30] = 1;
    CHECK_THROWS_AS(wire::from_ble_pointer(bad), Error);
    bad = rec;
    bad[2] = 2;
    CHECK_THROWS_AS(wire::from_ble_pointer(bad), Error);
    CHECK_THROWS_AS(wire::from_ble_pointer(ByteView(rec).first(30)), Error);
  }
}

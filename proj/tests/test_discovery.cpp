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

#include <atomic>
#include <thread>

#include "privdisc/discovery.hpp"
#include "privdisc/wire.hpp"
#include "forge.hpp"
#include "support.hpp"

using namespace privdisc;
using namespace privdisc::discovery;
using privdisc::testing::BroadcastFields;
using privdisc::testing::forge_broadcast;
using privdisc::testing::ossl_hmac;
using privdisc::testing::ossl_tagged;

namespace {

constexpr std::uint64_t kNow = 1'700'000'000;

struct Fixture {
  privdisc::testing::World w{81};
  std::shared_ptr<const Principal> server = w.member("dev.v.io/u/TV");
  std::shared_ptr<const Principal> alice = w.member("dev.v.io/u/Alice/Phone");
  std::shared_ptr<const Principal> bob = w.member("dev.v.io/u/Bob/Phone");
  PrefixPolicy audience = PrefixPolicy::parse("dev.v.io/u/Alice");
  PrefixPolicy any = PrefixPolicy::parse("dev.v.io");
  BroadcastServer bs{{server, w.anchors}};

  ClientConfig client(std::shared_ptr<const Principal> p) { return {std::move(p), w.anchors, any}; }
};

}  // namespace

TEST_CASE("0-RTT key schedule matches an OpenSSL recomputation") {
  SeededEntropy rng(82);
  const auto s = dh::Exponent::random(rng), x = dh::Exponent::random(rng), y = dh::Exponent::random(rng);
  const auto gs = s.public_element(), gx = x.public_element(), gy = y.public_element();
  const auto gsx = *x.shared(gs), gxy = *x.shared(gy);
  const Key32 k = ossl_tagged(0x20, privdisc::testing::cat({gs.view(), gx.view(), gsx.view()}));
  const auto keys = key_schedule_0rtt(gs, gx, gsx);
  CHECK(keys.htk == ossl_hmac(k, Bytes{1}));
  CHECK(keys.htk2 == ossl_hmac(k, Bytes{2}));
  CHECK(keys.exk == ossl_hmac(k, Bytes{3}));
  CHECK(keys.eadk == ossl_hmac(k, Bytes{4}));
  const Key32 h2 = ossl_tagged(0x21, privdisc::testing::cat({gx.view(), gy.view(), gxy.view()}));
  CHECK(derive_atk(keys.exk, gx, gy, gxy) == ossl_hmac(keys.exk, h2));
  CHECK(*s.shared(gx) == gsx);
}

TEST_CASE("broadcast signed message layout") {
  BroadcastId bid{};
  bid[0] = 0xaa;
  SeededEntropy rng(83);
  const auto gs = dh::Exponent::random(rng).public_element();
  const Bytes m = broadcast_signed_message(bid, as_bytes("bl"), gs, 0x0102);
  CHECK(m.size() == 16 + 4 + 2 + 32 + 8);
  CHECK(to_hex(ByteView(m).subspan(16, 6)) == "00000002626c");
  CHECK(to_hex(ByteView(m).last(8)) == "0000000000000102");
}

TEST_CASE("replay cache") {
  ReplayCache c(2);
  SessionId a{}, b{}, d{};
  b[0] = 1;
  d[0] = 2;
  CHECK(c.insert(a) == InsertResult::kInserted);
  CHECK(c.contains(a));
  CHECK(c.insert(a) == InsertResult::kDuplicate);
  CHECK(c.insert(b) == InsertResult::kInserted);
  CHECK(c.insert(d) == InsertResult::kFull);
  CHECK(c.size() == 2);
}

TEST_CASE("honest 0-RTT exchange with early data and reply") {
  Fixture f;
  const Bytes wire_bytes = wire::encode(f.bs.make_broadcast(f.audience, 600, kNow, f.w.rng));
  const auto found = process_broadcast(f.client(f.alice), wire_bytes, kNow + 1);
  REQUIRE(found.ok());
  CHECK(found.service->server_name.str() == "dev.v.io/u/TV");
  ClientConnection conn(f.client(f.alice), *found.service);
  const auto f1 = conn.connect(as_bytes("GET /status"), kNow + 2, f.w.rng);
  REQUIRE(f1);
  CHECK(conn.state() == ClientState::kAwaitResponse);
  const auto acc = f.bs.accept(*f1, kNow + 2, f.w.rng, as_bytes("200 OK"));
  REQUIRE(acc.ok());
  CHECK(*acc.early_data == to_bytes("GET /status"));
  CHECK(acc.client_name->str() == "dev.v.io/u/Alice/Phone");
  REQUIRE(conn.on_response(*acc.f2));
  CHECK(conn.state() == ClientState::kComplete);
  CHECK(*conn.atk() == acc.atk);
  CHECK(*conn.reply() == to_bytes("200 OK"));
  CHECK_FALSE(conn.reveal_ephemeral());
}

TEST_CASE("exchange without early data") {
  Fixture f;
  const auto b = f.bs.make_broadcast(f.audience, 600, kNow, f.w.rng);
  const auto found = process_broadcast(f.client(f.alice), b, kNow);
  ClientConnection conn(f.client(f.alice), *found.service);
  const auto f1 = conn.connect(std::nullopt, kNow, f.w.rng);
  CHECK_FALSE(f1->c2);
  const auto acc = f.bs.accept(*f1, kNow, f.w.rng);
  REQUIRE(acc.ok());
  CHECK_FALSE(acc.early_data);
  CHECK(conn.on_response(*acc.f2));
  CHECK_FALSE(conn.reply());
}

TEST_CASE("clients outside the audience cannot read the broadcast") {
  Fixture f;
  const auto b = f.bs.make_broadcast(f.audience, 600, kNow, f.w.rng);
  CHECK(process_broadcast(f.client(f.bob), b, kNow).status == DiscoverStatus::kNotAuthorized);
  // A string prefix that is not a component prefix does not qualify.
  const auto alicia = f.w.member("dev.v.io/u/Alicia");
  CHECK(process_broadcast(f.client(alicia), b, kNow).status == DiscoverStatus::kNotAuthorized);
}

TEST_CASE("client policy and trust anchors apply to the server") {
  Fixture f;
  const auto b = f.bs.make_broadcast(f.audience, 600, kNow, f.w.rng);
  auto cfg = f.client(f.alice);
  cfg.policy = PrefixPolicy::parse("dev.v.io/u/Printer");
  CHECK(process_broadcast(cfg, b, kNow).status == DiscoverStatus::kPolicy);
  privdisc::testing::World other(84);
  cfg = f.client(f.alice);
  cfg.anchors = other.anchors;
  CHECK(process_broadcast(cfg, b, kNow).status == DiscoverStatus::kBadChain);
}

TEST_CASE("expiry on both sides") {
  Fixture f;
  const auto b = f.bs.make_broadcast(f.audience, 600, kNow, f.w.rng);
  CHECK(process_broadcast(f.client(f.alice), b, kNow + 600).status == DiscoverStatus::kExpired);
  const auto found = process_broadcast(f.client(f.alice), b, kNow + 599);
  REQUIRE(found.ok());
  ClientConnection late(f.client(f.alice), *found.service);
  CHECK_FALSE(late.connect(std::nullopt, kNow + 600, f.w.rng));
  CHECK(late.abort_reason() == ClientAbort::kExpired);
  ClientConnection conn(f.client(f.alice), *found.service);
  const auto f1 = conn.connect(std::nullopt, kNow + 599, f.w.rng);
  CHECK(f.bs.accept(*f1, kNow + 600, f.w.rng).status == AcceptStatus::kExpired);
}

TEST_CASE("exact replay of the first flight is rejected") {
  Fixture f;
  const auto b = f.bs.make_broadcast(f.audience, 600, kNow, f.w.rng);
  const auto found = process_broadcast(f.client(f.alice), b, kNow);
  ClientConnection conn(f.client(f.alice), *found.service);
  const auto f1 = conn.connect(as_bytes("early"), kNow, f.w.rng);
  CHECK(f.bs.accept(*f1, kNow, f.w.rng).ok());
  for (int i = 0; i < 5; ++i) CHECK(f.bs.accept(*f1, kNow + 1, f.w.rng).status == AcceptStatus::kReplay);
  CHECK(f.bs.cache_size() == 1);
}

TEST_CASE("replay cache capacity") {
  Fixture f;
  BroadcastServer small({f.server, f.w.anchors, 1});
  const auto b = small.make_broadcast(f.audience, 600, kNow, f.w.rng);
  const auto found = process_broadcast(f.client(f.alice), b, kNow);
  ClientConnection c1(f.client(f.alice), *found.service), c2(f.client(f.alice), *found.service);
  CHECK(small.accept(*c1.connect(std::nullopt, kNow, f.w.rng), kNow, f.w.rng).ok());
  CHECK(small.accept(*c2.connect(std::nullopt, kNow, f.w.rng), kNow, f.w.rng).status == AcceptStatus::kCacheFull);
}

TEST_CASE("first-flight tampering") {
  Fixture f;
  const auto b = f.bs.make_broadcast(f.audience, 600, kNow, f.w.rng);
  const auto found = process_broadcast(f.client(f.alice), b, kNow);
  ClientConnection conn(f.client(f.alice), *found.service);
  const auto f1 = *conn.connect(as_bytes("early"), kNow, f.w.rng);

  auto t = f1;
  t.c1[5] ^= 1;
  CHECK(f.bs.accept(t, kNow, f.w.rng).status == AcceptStatus::kAeadFailure);
  t = f1;
  (*t.c2)[0] ^= 1;
  const auto bad_early = f.bs.accept(t, kNow, f.w.rng);
  CHECK(bad_early.status == AcceptStatus::kEarlyDataFailure);
  CHECK_FALSE(bad_early.f2);
  t = f1;
  t.bid[15] ^= 1;
  CHECK(f.bs.accept(t, kNow, f.w.rng).status == AcceptStatus::kUnknownBroadcast);
  t = f1;
  t.gx = dh::Exponent::random(f.w.rng).public_element();
  CHECK(f.bs.accept(t, kNow, f.w.rng).status == AcceptStatus::kAeadFailure);
  // Rejected flights are not cached, so the genuine one still succeeds.
  CHECK(f.bs.accept(f1, kNow, f.w.rng).ok());
}

TEST_CASE("server applies its broadcast policy to the client") {
  Fixture f;
  const auto b = f.bs.make_broadcast(f.audience, 600, kNow, f.w.rng);
  const auto found = process_broadcast(f.client(f.alice), b, kNow);
  // Bob learned the advertisement out of band and tries to connect.
  ClientConnection conn(f.client(f.bob), *found.service);
  const auto f1 = conn.connect(std::nullopt, kNow, f.w.rng);
  CHECK(f.bs.accept(*f1, kNow, f.w.rng).status == AcceptStatus::kPolicy);
}

TEST_CASE("response tampering") {
  Fixture f;
  const auto b = f.bs.make_broadcast(f.audience, 600, kNow, f.w.rng);
  const auto found = process_broadcast(f.client(f.alice), b, kNow);
  ClientConnection conn(f.client(f.alice), *found.service);
  const auto f1 = conn.connect(std::nullopt, kNow, f.w.rng);
  auto f2 = *f.bs.accept(*f1, kNow, f.w.rng).f2;
  f2.c1[0] ^= 1;
  CHECK_FALSE(conn.on_response(f2));
  CHECK(conn.state() == ClientState::kAborted);
}

TEST_CASE("rotation retires the previous broadcast") {
  Fixture f;
  const auto b1 = f.bs.make_broadcast(f.audience, 600, kNow, f.w.rng);
  CHECK(f.bs.counter() == 1);
  CHECK(load_u64(ByteView(b1.bid).first(8)) == 1);
  CHECK(f.bs.reveal_semi_static(b1.bid));
  const auto found = process_broadcast(f.client(f.alice), b1, kNow);
  ClientConnection conn(f.client(f.alice), *found.service);
  const auto f1 = conn.connect(std::nullopt, kNow, f.w.rng);
  const auto b2 = f.bs.make_broadcast(f.audience, 600, kNow, f.w.rng);
  CHECK(load_u64(ByteView(b2.bid).first(8)) == 2);
  CHECK_FALSE(f.bs.reveal_semi_static(b1.bid));
  CHECK(f.bs.accept(*f1, kNow, f.w.rng).status == AcceptStatus::kUnknownBroadcast);
  CHECK(*f.bs.current_bid() == b2.bid);
}

TEST_CASE("signed broadcast fields cannot be altered") {
  Fixture f;
  const BroadcastFields g = privdisc::testing::genuine_fields(*f.server, kNow + 600, f.w.rng);
  const auto cfg = f.client(f.alice);
  REQUIRE(process_broadcast(cfg, forge_broadcast(*f.server, f.audience, g, g, f.w.rng), kNow).ok());

  BroadcastFields m = g;
  m.bid[3] ^= 1;
  CHECK(process_broadcast(cfg, forge_broadcast(*f.server, f.audience, g, m, f.w.rng), kNow).status ==
        DiscoverStatus::kBadSignature);
  m = g;
  m.blessing = wire::encode_body(f.w.member("dev.v.io/u/Printer")->blessing());
  CHECK(process_broadcast(cfg, forge_broadcast(*f.server, f.audience, g, m, f.w.rng), kNow).status ==
        DiscoverStatus::kBadSignature);
  m = g;
  m.gs = dh::Exponent::random(f.w.rng).public_element();
  CHECK(process_broadcast(cfg, forge_broadcast(*f.server, f.audience, g, m, f.w.rng), kNow).status ==
        DiscoverStatus::kBadSignature);
  m = g;
  m.expiry += 3600;
  CHECK(process_broadcast(cfg, forge_broadcast(*f.server, f.audience, g, m, f.w.rng), kNow).status ==
        DiscoverStatus::kBadSignature);
  // The cleartext hint disagreeing with the signed expiry.
  auto b = forge_broadcast(*f.server, f.audience, g, g, f.w.rng);
  b.expiry_hint += 1;
  CHECK(process_broadcast(cfg, b, kNow).status == DiscoverStatus::kBadSignature);
}

TEST_CASE("forward secrecy window") {
  Fixture f;
  const auto b = f.bs.make_broadcast(f.audience, 600, kNow, f.w.rng);
  const auto found = process_broadcast(f.client(f.alice), b, kNow);
  ClientConnection conn(f.client(f.alice), *found.service);
  const auto f1 = *conn.connect(as_bytes("early secret"), kNow, f.w.rng);
  const auto acc = f.bs.accept(f1, kNow, f.w.rng, as_bytes("late secret"));
  REQUIRE(conn.on_response(*acc.f2));
  const auto s = *f.bs.reveal_semi_static(b.bid);

  const auto rep = demonstrate_pfs_window(f1, *acc.f2, s);
  CHECK(rep.early_data_recovered);
  CHECK(rep.early_data == to_bytes("early secret"));
  CHECK_FALSE(rep.app_data_recovered);

  // A wrong client exponent yields nothing.
  SeededEntropy r2(85);
  const auto wrong = demonstrate_pfs_window_client(f1, *acc.f2, s.public_element(), dh::Exponent::random(r2));
  CHECK_FALSE(wrong.early_data_recovered);
  CHECK_FALSE(wrong.app_data_recovered);

  // The client's ephemeral, taken before the exchange completes, opens both.
  ClientConnection c2(f.client(f.alice), *found.service);
  const auto g1 = *c2.connect(as_bytes("early 2"), kNow, f.w.rng);
  const auto x = *c2.reveal_ephemeral();
  const auto acc2 = f.bs.accept(g1, kNow, f.w.rng, as_bytes("late 2"));
  REQUIRE(c2.on_response(*acc2.f2));
  const auto both = demonstrate_pfs_window_client(g1, *acc2.f2, s.public_element(), x);
  CHECK(both.early_data == to_bytes("early 2"));
  CHECK(both.app_data_recovered);
  CHECK(both.app_data == to_bytes("late 2"));
}

TEST_CASE("single-prefix advertisement fits the mDNS budget") {
  Fixture f;
  REQUIRE(f.server->blessing().chain.size() == 3);
  const Bytes bytes = wire::encode(f.bs.make_broadcast(f.audience, 600, kNow, f.w.rng));
  MESSAGE("single-prefix broadcast: " << bytes.size() << " bytes");
  CHECK(bytes.size() <= wire::kMdnsBudget);
  CHECK(wire::from_mdns_txt(wire::to_mdns_txt(ByteView(bytes))) == bytes);
}

TEST_CASE("concurrent accepts with rotation") {
  Fixture f;
  const auto b = f.bs.make_broadcast(f.audience, 600, kNow, f.w.rng);
  const auto found = process_broadcast(f.client(f.alice), b, kNow);
  std::vector<F1> flights;
  for (int i = 0; i < 24; ++i) {
    ClientConnection c(f.client(f.alice), *found.service);
    flights.push_back(*c.connect(std::nullopt, kNow, f.w.rng));
  }
  std::atomic<int> accepted{0}, unknown{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([&, t] {
      SeededEntropy rng(100 + t);
      for (int i = t; i < 24; i += 4) {
        const auto st = f.bs.accept(flights[i], kNow, rng).status;
        if (st == AcceptStatus::kAccepted) ++accepted;
        if (st == AcceptStatus::kUnknownBroadcast) ++unknown;
      }
    });
  threads.emplace_back([&] {
    SeededEntropy rng(200);
    f.bs.make_broadcast(f.audience, 600, kNow, rng);
  });
  for (auto& t : threads) t.join();
  CHECK(accepted + unknown == 24);
}

TEST_CASE("key schedule outputs are separated") {
  SeededEntropy rng(86);
  for (int i = 0; i < 100; ++i) {
    const auto s = dh::Exponent::random(rng), x = dh::Exponent::random(rng);
    const auto gs = s.public_element(), gx = x.public_element();
    const auto k = key_schedule_0rtt(gs, gx, *x.shared(gs));
    const std::array<Key32, 4> all = {k.htk, k.htk2, k.exk, k.eadk};
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = a + 1; b < 4; ++b) CHECK(all[a] != all[b]);
    // atk moves with y; eadk does not depend on it.
    const auto y1 = dh::Exponent::random(rng), y2 = dh::Exponent::random(rng);
    const auto atk1 = derive_atk(k.exk, gx, y1.public_element(), *x.shared(y1.public_element()));
    const auto atk2 = derive_atk(k.exk, gx, y2.public_element(), *x.shared(y2.public_element()));
    CHECK(atk1 != atk2);
    CHECK(atk1 != k.eadk);
  }
}

TEST_CASE("replay soundness up to cache capacity") {
  Fixture f;
  constexpr std::size_t kCapacity = 8;
  BroadcastServer bs({f.server, f.w.anchors, kCapacity});
  const auto b = bs.make_broadcast(f.audience, 600, kNow, f.w.rng);
  const auto found = process_broadcast(f.client(f.alice), b, kNow);
  std::vector<F1> flights;
  for (std::size_t i = 0; i <= kCapacity; ++i) {
    ClientConnection c(f.client(f.alice), *found.service);
    flights.push_back(*c.connect(std::nullopt, kNow, f.w.rng));
  }
  for (std::size_t i = 0; i < kCapacity; ++i) CHECK(bs.accept(flights[i], kNow, f.w.rng).ok());
  for (std::size_t i = 0; i < kCapacity; ++i)
    CHECK(bs.accept(flights[i], kNow, f.w.rng).status == AcceptStatus::kReplay);
  CHECK(bs.accept(flights[kCapacity], kNow, f.w.rng).status == AcceptStatus::kCacheFull);
  CHECK(bs.accept(flights[0], kNow, f.w.rng).status == AcceptStatus::kReplay);
}

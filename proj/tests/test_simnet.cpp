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

#include <cstdlib>
#include <fstream>

#include "scenarios.hpp"

using namespace privdisc;
using namespace privdisc::simnet;
using namespace privdisc::testing;

namespace {

constexpr std::uint64_t kStart = 1'700'000'000;

struct DiscWorld {
  World w{92};
  std::shared_ptr<const Principal> server = w.member("dev.v.io/u/TV");
  std::shared_ptr<const Principal> phone = w.member("dev.v.io/u/Alice/Phone");
  std::shared_ptr<const Principal> other = w.member("dev.v.io/u/Bob/Phone");

  Fabric fabric(std::uint64_t seed) const {
    Fabric f(seed, kStart);
    f.add_party("tv", std::make_shared<DiscoveryServerParty>(discovery::ServerConfig{server, w.anchors},
                                                             PrefixPolicy::parse("dev.v.io/u/Alice"),
                                                             std::vector<std::string>{"phone", "bob"}, 600,
                                                             to_bytes("pong")));
    f.add_party("phone", std::make_shared<DiscoveryClientParty>(
                             discovery::ClientConfig{phone, w.anchors, PrefixPolicy::parse("dev.v.io")},
                             to_bytes("ping")));
    f.add_party("bob", std::make_shared<DiscoveryClientParty>(
                           discovery::ClientConfig{other, w.anchors, PrefixPolicy::parse("dev.v.io")}));
    f.add_eavesdropper("tap");
    return f;
  }
};

bool contains(const PartyReport& p, std::string_view needle) {
  for (const auto& l : p.lines)
    if (l.find(needle) != std::string::npos) return true;
  return false;
}

std::size_t count_lines(const PartyReport& p, std::string_view needle) {
  std::size_t n = 0;
  for (const auto& l : p.lines) n += l.find(needle) != std::string::npos;
  return n;
}

// Sends the client's blessing in the clear, like a naive handshake would.
class PlaintextIdentityParty final : public Party {
 public:
  PlaintextIdentityParty(std::string to, Bytes blessing) : to_(std::move(to)), blessing_(std::move(blessing)) {}
  std::vector<Outbound> start(Context&) override { return {{to_, blessing_}}; }
  std::vector<Outbound> on_frame(const std::string&, ByteView, Context&) override { return {}; }
  std::vector<std::string> output() const override { return {"sent identity"}; }

 private:
  std::string to_;
  Bytes blessing_;
};

}  // namespace

TEST_CASE("script text round trip") {
  const std::string text =
      "# comment\n"
      "deliver\n"
      "drop\n"
      "defer\n"
      "redirect eve\n"
      "mutate 12 ff\n"
      "replay 3\n"
      "inject server 50445331\n"
      "delay 31\n";
  const Script s = parse_script(text);
  REQUIRE(s.size() == 8);
  CHECK(s[4].offset == 12);
  CHECK(s[4].xor_mask == 0xff);
  CHECK(s[6].bytes == from_hex("50445331"));
  CHECK(s[7].seconds == 31);
  CHECK(parse_script(script_to_text(s)) == s);
}

TEST_CASE("malformed scripts") {
  for (const char* bad : {"explode", "deliver now", "mutate 1", "mutate 1 00", "mutate x 1", "replay",
                          "inject server zz", "delay -1", "redirect"})
    CHECK_THROWS_AS(parse_script(bad), Error);
  MaWorld mw;
  auto f = mw.fabric(1, AuthMode::kCacheable);
  auto r = act(Action::Kind::kRedirect);
  r.party = "nobody";
  CHECK_THROWS_AS(f.run({r}), Error);
  auto f2 = mw.fabric(1, AuthMode::kCacheable);
  CHECK_THROWS_AS(f2.add_party("client", std::make_shared<PlaintextIdentityParty>("x", Bytes{})), Error);
  CHECK_THROWS_AS(f2.add_party("adversary", std::make_shared<PlaintextIdentityParty>("x", Bytes{})), Error);
}

TEST_CASE("transcript scan counts overlapping occurrences") {
  Transcript t(2);
  t[0].bytes = from_hex("aaaa00aa");
  t[1].bytes = from_hex("aaaaaa");
  CHECK(transcript_scan(t, from_hex("aaaa")) == 3);
  CHECK(transcript_scan(t, from_hex("bb")) == 0);
  CHECK(transcript_scan({}, from_hex("aa")) == 0);
}

TEST_CASE("passthrough mutual authentication completes in every mode") {
  MaWorld mw;
  for (auto mode : {AuthMode::kCacheable, AuthMode::kUnlinkable, AuthMode::kSigmaBaseline}) {
    auto f = mw.fabric(3, mode);
    const auto r = f.run({});
    const auto client = session_lines(*r.party("client"));
    const auto server = session_lines(*r.party("server"));
    REQUIRE(client.size() == 2);
    REQUIRE(server.size() == 2);
    for (const auto& c : client) {
      CHECK(c.state == "complete");
      CHECK(c.peer == "dev.v.io/u/Alice/TV");
      const auto* s = find_line(server, c.sid);
      REQUIRE(s);
      CHECK(s->state == "complete");
      CHECK(s->peer == "dev.v.io/u/Alice/Phone");
      CHECK(s->atk == c.atk);
    }
    CHECK(r.transcript.size() == 6);
    CHECK(r.eavesdroppers.at("tap").size() == 6);
    CHECK(transcript_scan(r.transcript, mw.client_blessing()) == 0);
    // The sid appears in M1, M2 and M3 of its own session.
    CHECK(transcript_scan(r.transcript, from_hex(client[0].sid)) >= 3);
  }
}

TEST_CASE("plaintext identity fixture is visible to the scan") {
  MaWorld mw;
  Fabric f(4, kStart);
  f.add_party("naive", std::make_shared<PlaintextIdentityParty>("sink", mw.client_blessing()));
  f.add_party("sink", std::make_shared<PlaintextIdentityParty>("naive", Bytes{}));
  const auto r = f.run({});
  CHECK(transcript_scan(r.transcript, mw.client_blessing()) > 0);
}

TEST_CASE("dropping M2 times the client out") {
  MaWorld mw;
  auto f = mw.fabric(5, AuthMode::kCacheable, 1);
  const auto r = f.run(parse_script("deliver\ndrop\n"));
  const auto client = session_lines(*r.party("client"));
  REQUIRE(client.size() == 1);
  CHECK(client[0].state == "aborted");
  CHECK(r.party("client")->lines[0].find("reason=timeout") != std::string::npos);
  CHECK(session_lines(*r.party("server"))[0].state == "aborted");
  CHECK_FALSE(r.transcript[1].delivered);
}

TEST_CASE("delay below the timeout keeps sessions alive") {
  MaWorld mw;
  auto f = mw.fabric(6, AuthMode::kCacheable, 1);
  const auto r = f.run(parse_script("deliver\ndelay 29\n"));
  CHECK(session_lines(*r.party("client"))[0].state == "complete");
  auto g = mw.fabric(6, AuthMode::kCacheable, 1);
  const auto late = g.run(parse_script("deliver\ndelay 30\n"));
  CHECK(session_lines(*late.party("client"))[0].state == "aborted");
}

TEST_CASE("identical seed and script give identical reports") {
  MaWorld mw;
  const auto script = parse_script("deliver\ndefer\nmutate 40 01\nreplay 0\n");
  auto a = mw.fabric(7, AuthMode::kUnlinkable);
  auto b = mw.fabric(7, AuthMode::kUnlinkable);
  const auto ra = a.run(script).to_text();
  CHECK(ra == b.run(script).to_text());
  auto c = mw.fabric(8, AuthMode::kUnlinkable);
  CHECK(ra != c.run(script).to_text());
}

TEST_CASE("compromise hooks do not disturb the run") {
  MaWorld mw;
  DiscWorld dw;
  const auto script = parse_script("deliver\ndeliver\nreplay 1\n");
  const auto probe = [](const Fabric& f) {
    const auto hooks = f.hooks();
    for (const auto& e : f.transcript()) {
      SessionId sid{};
      if (e.bytes.size() >= 7 + sid.size()) std::copy_n(e.bytes.begin() + 7, sid.size(), sid.begin());
      BroadcastId bid{};
      std::copy_n(sid.begin(), bid.size(), bid.begin());
      for (const auto& name : {"client", "server", "tv", "phone", "bob"}) {
        if (!f.find(name)) continue;
        (void)hooks.reveal_session_state(name, sid);
        (void)hooks.reveal_key(name, sid);
        (void)hooks.reveal_broadcast(name, bid);
        (void)hooks.corrupt(name);
      }
    }
  };
  auto plain_ma = mw.fabric(9, AuthMode::kCacheable);
  auto hooked_ma = mw.fabric(9, AuthMode::kCacheable);
  hooked_ma.set_observer(probe);
  CHECK(plain_ma.run(script).to_text() == hooked_ma.run(script).to_text());

  auto plain_d = dw.fabric(9);
  auto hooked_d = dw.fabric(9);
  hooked_d.set_observer(probe);
  CHECK(plain_d.run(script).to_text() == hooked_d.run(script).to_text());
}

TEST_CASE("hooks reveal session state") {
  MaWorld mw;
  auto f = mw.fabric(10, AuthMode::kCacheable, 1);
  std::optional<Bytes> x_during;
  std::string sid_hex;
  f.set_observer([&](const Fabric& fab) {
    if (fab.transcript().size() == 1 && !x_during) {
      const auto sid = wire::decode<M1>(fab.transcript()[0].bytes).sid;
      x_during = fab.hooks().reveal_session_state("client", sid);
    }
  });
  const auto r = f.run({});
  REQUIRE(x_during);
  CHECK(x_during->size() == 32);
  const auto sid = wire::decode<M1>(r.transcript[0].bytes).sid;
  // Ephemerals are erased once the session completes; keys remain.
  CHECK_FALSE(f.hooks().reveal_session_state("client", sid));
  const auto kc = f.hooks().reveal_key("client", sid);
  REQUIRE(kc);
  CHECK(kc == f.hooks().reveal_key("server", sid));
  const auto corrupted = f.hooks().corrupt("server");
  REQUIRE(corrupted);
  CHECK(corrupted->keypair.pub == mw.server->keypair.pub);
  CHECK(corrupted->keyring);
}

TEST_CASE("discovery over the fabric") {
  DiscWorld dw;
  auto f = dw.fabric(11);
  const auto r = f.run({});
  const auto& tv = *r.party("tv");
  const auto& phone = *r.party("phone");
  const auto& bob = *r.party("bob");
  CHECK(contains(tv, "broadcast bid="));
  CHECK(count_lines(tv, "accepted") == 1);
  CHECK(contains(tv, "peer=dev.v.io/u/Alice/Phone"));
  CHECK(contains(tv, "early=70696e67"));
  CHECK(contains(phone, "dev.v.io/u/TV"));
  CHECK(contains(phone, "complete"));
  CHECK(contains(bob, "not-authorized"));
  // Nothing in the clear names either side.
  CHECK(transcript_scan(r.transcript, wire::encode_body(dw.server->blessing())) == 0);
  CHECK(transcript_scan(r.transcript, wire::encode_body(dw.phone->blessing())) == 0);
  CHECK(transcript_scan(r.eavesdroppers.at("tap"), as_bytes("dev.v.io/u/Alice/Phone")) == 0);
}

TEST_CASE("replayed first flight is not accepted twice") {
  DiscWorld dw;
  auto f = dw.fabric(12);
  // 0 broadcast->phone, 1 broadcast->bob, 2 F1 from phone.
  const auto r = f.run(parse_script("deliver\ndeliver\nreplay 2\nreplay 2\n"));
  CHECK(r.transcript[2].kind == "F1");
  const auto& tv = *r.party("tv");
  CHECK(count_lines(tv, "accepted") == 1);
  CHECK(count_lines(tv, "replay") == 2);
}

TEST_CASE("broadcast delivered after expiry is refused") {
  DiscWorld dw;
  auto f = dw.fabric(13);
  const auto r = f.run(parse_script("defer\ndefer\ndelay 600\n"));
  CHECK(contains(*r.party("phone"), "expired"));
  CHECK(count_lines(*r.party("tv"), "accept") == 0);
}

TEST_CASE("golden transcript") {
  MaWorld mw;
  auto f = mw.fabric(14, AuthMode::kCacheable);
  const std::string text = f.run(parse_script("deliver\ndefer\nmutate 9 80\n")).to_text();
  const std::string path = std::string(PRIVDISC_GOLDEN_DIR) + "/mutual_auth_cacheable.txt";
  if (std::getenv("PRIVDISC_UPDATE_GOLDEN")) {
    std::ofstream(path, std::ios::binary) << text;
  }
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  const std::string golden((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == golden);
}

TEST_CASE("adversarial scripts abort the attacked session") {
  MaWorld mw;
  for (std::uint64_t n = 0; n < 42; ++n) {
    const auto c = make_adversarial_case(mw, n);
    auto f = mw.fabric(c.seed, c.mode);
    const auto r = f.run(c.script);
    const auto o = evaluate(mw, c, r);
    INFO(attack_name(c.attack), " mode ", auth_mode_name(c.mode), ": ", o.failure);
    CHECK(passed(o));
  }
}

TEST_CASE("an untouched session survives a splice on its neighbour") {
  MaWorld mw;
  const auto c = make_adversarial_case(mw, static_cast<int>(Attack::kSpliceM2));
  REQUIRE(c.attack == Attack::kSpliceM2);
  auto f = mw.fabric(c.seed, c.mode);
  const auto r = f.run(c.script);
  const auto client = session_lines(*r.party("client"));
  REQUIRE(client.size() == 2);
  CHECK(find_line(client, c.attacked_sid)->state == "aborted");
  for (const auto& l : client)
    if (l.sid != c.attacked_sid) CHECK(l.state == "complete");
}

TEST_CASE("airdrop fix keeps the receiver private") {
  const auto rep = airdrop_fix_scenario();
  CHECK(rep.eavesdropper_receiver_blessing_hits == 0);
  CHECK(rep.sender_complete);
  CHECK(rep.receiver_complete);
  CHECK(rep.file_delivered);
  CHECK(rep.receiver_frames_sent > 0);
  CHECK(transcript_scan(rep.report.transcript, rep.receiver_blessing) == 0);

  AirdropOptions stranger;
  stranger.sender_is_contact = false;
  const auto silent = airdrop_fix_scenario(stranger);
  CHECK(silent.receiver_frames_sent == 0);
  CHECK_FALSE(silent.sender_complete);
  CHECK_FALSE(silent.file_delivered);
}

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


#pragma once

// Mutual-authentication scenarios over the simulated network, shared by the
// simnet tests and the acceptance binary.

#include <set>
#include <sstream>

#include "privdisc/simnet.hpp"
#include "support.hpp"

namespace privdisc::testing {

inline std::uint64_t draw_u64(Entropy& rng) {
  const auto b = rng.draw<8>();
  return load_u64(ByteView(b));
}

struct MaWorld {
  World w{91};
  std::shared_ptr<const Principal> client = w.member("dev.v.io/u/Alice/Phone", "dev.v.io/u");
  std::shared_ptr<const Principal> server = w.member("dev.v.io/u/Alice/TV", "dev.v.io/u/Alice");
  PrefixPolicy any = PrefixPolicy::parse("dev.v.io");
  std::shared_ptr<const mutual_auth::CachedServerIdentity> cached =
      mutual_auth::make_cached_identity(*server, w.rng);

  Bytes client_blessing() const { return wire::encode_body(client->blessing()); }

  /// Client "client" opens `sessions` handshakes with server "server".
  simnet::Fabric fabric(std::uint64_t seed, AuthMode mode, std::size_t sessions = 2) const {
    simnet::Fabric f(seed, 1'700'000'000);
    f.add_party("client", std::make_shared<simnet::MutualAuthClientParty>(
                              "server", mutual_auth::Config{client, w.anchors, any, mode}, sessions));
    f.add_party("server", std::make_shared<simnet::MutualAuthServerParty>(
                              mutual_auth::Config{server, w.anchors, any, mode},
                              mode == AuthMode::kCacheable ? cached : nullptr));
    f.add_party("eve", std::make_shared<simnet::MutualAuthServerParty>(
                           mutual_auth::Config{server, w.anchors, any, mode}));
    f.add_eavesdropper("tap");
    return f;
  }
};

struct SessionLine {
  std::string sid;
  std::string state;
  std::string peer;
  std::string atk;
};

inline std::vector<SessionLine> session_lines(const simnet::PartyReport& p) {
  std::vector<SessionLine> out;
  for (const auto& line : p.lines) {
    std::istringstream in(line);
    std::string word;
    SessionLine s;
    in >> word >> s.sid >> s.state;
    while (in >> word) {
      if (word.rfind("peer=", 0) == 0) s.peer = word.substr(5);
      if (word.rfind("atk=", 0) == 0) s.atk = word.substr(4);
    }
    out.push_back(s);
  }
  return out;
}

inline const SessionLine* find_line(const std::vector<SessionLine>& lines, const std::string& sid) {
  for (const auto& l : lines)
    if (l.sid == sid) return &l;
  return nullptr;
}

enum class Attack { kMutateM1, kMutateM2, kMutateM3, kSpliceM2, kSpliceM3, kReplayOldM1, kRedirectM3 };
inline constexpr int kAttackKinds = 7;

struct AdversarialCase {
  Attack attack;
  AuthMode mode;
  std::uint64_t seed;
  simnet::Script script;
  std::string attacked_sid;  // hex
};

struct AdversarialOutcome {
  bool attacked_server_session_done = false;  // aborted or never created
  bool attacked_client_session_ok = true;     // aborted unless it legitimately sent M3
  bool no_unmatched_completion = true;        // server completions pair with a client session and key
  bool blessing_hidden = true;                // client blessing bytes never on the wire when a client aborted
  std::string failure;
};

inline simnet::Action act(simnet::Action::Kind k) {
  simnet::Action a;
  a.kind = k;
  return a;
}

/// Builds one adversarial script. Transcript indices of an honest two-session
/// run: 0 M1a, 1 M1b, 2 M2a, 3 M2b, 4 M3a, 5 M3b.
inline AdversarialCase make_adversarial_case(const MaWorld& mw, std::uint64_t n) {
  using K = simnet::Action::Kind;
  static constexpr AuthMode kModes[] = {AuthMode::kCacheable, AuthMode::kUnlinkable, AuthMode::kSigmaBaseline};
  AdversarialCase c;
  c.attack = static_cast<Attack>(n % kAttackKinds);
  c.mode = kModes[(n / kAttackKinds) % 3];
  c.seed = 5000 + n;
  SeededEntropy rng(9000 + n);

  auto honest_fabric = mw.fabric(c.seed, c.mode);
  const auto honest = honest_fabric.run({});
  const auto& t = honest.transcript;
  const auto frame = [&](std::size_t i) { return t.at(i).bytes; };
  const auto sid_of = [](ByteView m1) { return to_hex(wire::decode<M1>(m1).sid); };
  c.attacked_sid = sid_of(frame(0));

  const auto mutate = [&](std::size_t i) {
    auto a = act(K::kMutate);
    a.offset = draw_u64(rng) % frame(i).size();
    a.xor_mask = static_cast<std::uint8_t>(1 + draw_u64(rng) % 255);
    return a;
  };
  const auto inject = [&](const std::string& to, Bytes bytes) {
    auto a = act(K::kInject);
    a.party = to;
    a.bytes = std::move(bytes);
    return a;
  };

  switch (c.attack) {
    case Attack::kMutateM1: c.script = {mutate(0)}; break;
    case Attack::kMutateM2: c.script = {act(K::kDeliver), act(K::kDeliver), mutate(2)}; break;
    case Attack::kMutateM3:
      c.script = {act(K::kDeliver), act(K::kDeliver), act(K::kDeliver), act(K::kDeliver), mutate(4)};
      break;
    case Attack::kSpliceM2: {
      auto m2 = wire::decode<M2>(frame(3));
      m2.sid = wire::decode<M2>(frame(2)).sid;
      c.script = {act(K::kDeliver), act(K::kDeliver), act(K::kDrop), inject("client", wire::encode(m2))};
      break;
    }
    case Attack::kSpliceM3: {
      auto m3 = wire::decode<M3>(frame(5));
      m3.sid = wire::decode<M3>(frame(4)).sid;
      c.script = {act(K::kDeliver), act(K::kDeliver), act(K::kDeliver),
                  act(K::kDeliver), act(K::kDrop),    inject("server", wire::encode(m3))};
      break;
    }
    case Attack::kReplayOldM1: {
      // An M1 recorded in an earlier run, replayed after the current one.
      auto old_fabric = mw.fabric(c.seed + 1'000'000, c.mode);
      const auto old = old_fabric.run({});
      c.attacked_sid = sid_of(old.transcript.at(0).bytes);
      c.script = {inject("server", old.transcript.at(0).bytes)};
      break;
    }
    case Attack::kRedirectM3: {
      // M3a goes to a second server instance that never saw M1a.
      auto a = act(K::kRedirect);
      a.party = "eve";
      c.script = {act(K::kDeliver), act(K::kDeliver), act(K::kDeliver), act(K::kDeliver), a};
      break;
    }
  }
  return c;
}

inline AdversarialOutcome evaluate(const MaWorld& mw, const AdversarialCase& c, const simnet::ScenarioReport& r) {
  AdversarialOutcome o;
  const auto client = session_lines(*r.party("client"));
  const auto server = session_lines(*r.party("server"));
  const auto* s = find_line(server, c.attacked_sid);
  o.attacked_server_session_done = !s || s->state == "aborted";
  if (!o.attacked_server_session_done) o.failure = "server session " + c.attacked_sid + " is " + s->state;

  // The client legitimately completes after sending M3, so M3 attacks only
  // show on the server.
  const bool m3_attack =
      c.attack == Attack::kMutateM3 || c.attack == Attack::kSpliceM3 || c.attack == Attack::kRedirectM3;
  if (const auto* cl = find_line(client, c.attacked_sid); cl && !m3_attack && cl->state != "aborted") {
    o.attacked_client_session_ok = false;
    o.failure = "client session " + c.attacked_sid + " is " + cl->state;
  }

  for (const auto& party : {"server", "eve"})
    for (const auto& l : session_lines(*r.party(party))) {
      if (l.state != "complete") continue;
      const auto* cl = find_line(client, l.sid);
      if (!cl || cl->state != "complete" || cl->atk != l.atk || l.peer != mw.client->blessing().name().str()) {
        o.no_unmatched_completion = false;
        o.failure = std::string(party) + " completed " + l.sid + " without a matching client";
      }
    }

  bool client_aborted = false;
  for (const auto& l : client) client_aborted |= l.state == "aborted";
  if (client_aborted && simnet::transcript_scan(r.transcript, mw.client_blessing()) != 0) {
    o.blessing_hidden = false;
    o.failure = "client blessing visible";
  }
  return o;
}

inline bool passed(const AdversarialOutcome& o) {
  return o.attacked_server_session_done && o.attacked_client_session_ok && o.no_unmatched_completion &&
         o.blessing_hidden;
}

inline const char* attack_name(Attack a) {
  switch (a) {
    case Attack::kMutateM1: return "mutate-m1";
    case Attack::kMutateM2: return "mutate-m2";
    case Attack::kMutateM3: return "mutate-m3";
    case Attack::kSpliceM2: return "splice-m2";
    case Attack::kSpliceM3: return "splice-m3";
    case Attack::kReplayOldM1: return "replay-old-m1";
    case Attack::kRedirectM3: return "redirect-m3";
  }
  return "?";
}

}  // namespace privdisc::testing

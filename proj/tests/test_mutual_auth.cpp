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

#include <unordered_set>

#include "privdisc/mutual_auth.hpp"
#include "privdisc/wire.hpp"
#include "support.hpp"

using namespace privdisc;
using namespace privdisc::mutual_auth;
using privdisc::testing::ossl_tagged;

namespace {

struct Fixture {
  privdisc::testing::World w{71};
  std::shared_ptr<const Principal> client = w.member("dev.v.io/u/Alice/Phone", "dev.v.io/u");
  std::shared_ptr<const Principal> server = w.member("dev.v.io/u/Alice/TV", "dev.v.io/u/Alice");
  std::shared_ptr<const Principal> outsider = w.member("dev.v.io/u/Bob/Phone", "dev.v.io/u");
  PrefixPolicy any = PrefixPolicy::parse("dev.v.io");

  Config client_cfg(AuthMode mode, std::shared_ptr<const Principal> who = nullptr) {
    return {who ? who : client, w.anchors, any, mode};
  }
  Config server_cfg(AuthMode mode) { return {server, w.anchors, any, mode}; }
};

struct Run {
  std::unique_ptr<ClientSession> c;
  std::unique_ptr<ServerSession> s;
  M1 m1;
  std::optional<M2> m2;
  std::optional<M3> m3;
};

Run handshake(Config cc, Config sc, Entropy& rng, std::shared_ptr<const CachedServerIdentity> cached = nullptr) {
  Run r{std::make_unique<ClientSession>(std::move(cc)), std::make_unique<ServerSession>(std::move(sc), cached), {},
        {}, {}};
  r.m1 = r.c->start(rng);
  r.m2 = r.s->on_init(r.m1, rng);
  if (r.m2) r.m3 = r.c->on_response(*r.m2);
  if (r.m3) r.s->on_finish(*r.m3);
  return r;
}

bool share_substring(ByteView a, ByteView b, std::size_t len) {
  if (a.size() < len || b.size() < len) return false;
  std::unordered_set<std::string> windows;
  for (std::size_t i = 0; i + len <= a.size(); ++i)
    windows.emplace(reinterpret_cast<const char*>(a.data() + i), len);
  for (std::size_t i = 0; i + len <= b.size(); ++i)
    if (windows.count(std::string(reinterpret_cast<const char*>(b.data() + i), len))) return true;
  return false;
}

// The M2 bytes an observer sees, minus framing and the cleartext policy.
Bytes m2_ciphertext_bytes(const M2& m2) {
  Bytes out(m2.gy.view().begin(), m2.gy.view().end());
  append(out, m2.sealed);
  if (m2.wrapped)
    for (const auto& b : m2.wrapped->branches) {
      append(out, b.ct.c1.to_bytes());
      append(out, b.ct.c2.to_bytes());
      append(out, b.ct.masked_seed);
      append(out, b.ct.sym_ct);
    }
  return out;
}

}  // namespace

TEST_CASE("key derivation matches an OpenSSL recomputation") {
  SeededEntropy rng(72);
  const auto x = dh::Exponent::random(rng), y = dh::Exponent::random(rng);
  const auto gx = x.public_element(), gy = y.public_element(), gxy = *x.shared(gy);
  const Bytes in = privdisc::testing::cat({gx.view(), gy.view(), gxy.view()});
  const auto k = kdf_sigma(gx, gy, gxy);
  CHECK(k.htk == ossl_tagged(0x10, in));
  CHECK(k.atk == ossl_tagged(0x11, in));
  CHECK(k.htk != k.atk);
}

TEST_CASE("honest handshakes complete in every mode") {
  Fixture f;
  for (auto mode : {AuthMode::kCacheable, AuthMode::kUnlinkable, AuthMode::kSigmaBaseline}) {
    CAPTURE(auth_mode_name(mode));
    auto r = handshake(f.client_cfg(mode), f.server_cfg(mode), f.w.rng);
    REQUIRE(r.c->state() == State::kComplete);
    REQUIRE(r.s->state() == State::kComplete);
    CHECK(r.c->output()->keys == r.s->output()->keys);
    CHECK(r.c->output()->peer.str() == "dev.v.io/u/Alice/TV");
    CHECK(r.s->output()->peer.str() == "dev.v.io/u/Alice/Phone");
    CHECK(r.c->sid() == r.s->sid());
    CHECK(r.c->output()->peer_blessing == f.server->blessing());
  }
}

TEST_CASE("ephemeral secrets are erased at completion") {
  Fixture f;
  auto r = handshake(f.client_cfg(AuthMode::kCacheable), f.server_cfg(AuthMode::kCacheable), f.w.rng);
  CHECK_FALSE(r.c->reveal_ephemeral());
  CHECK_FALSE(r.s->reveal_ephemeral());
  ClientSession pending(f.client_cfg(AuthMode::kCacheable));
  pending.start(f.w.rng);
  CHECK(pending.reveal_ephemeral());
  pending.abort(AbortReason::kTimeout);
  CHECK_FALSE(pending.reveal_ephemeral());
  CHECK(pending.abort_reason() == AbortReason::kTimeout);
}

TEST_CASE("client outside the server's audience learns nothing and sends nothing") {
  Fixture f;
  for (auto mode : {AuthMode::kCacheable, AuthMode::kUnlinkable}) {
    auto r = handshake(f.client_cfg(mode, f.outsider), f.server_cfg(mode), f.w.rng);
    CHECK(r.c->state() == State::kAborted);
    CHECK(r.c->abort_reason() == AbortReason::kNotAuthorized);
    CHECK_FALSE(r.m3);
    CHECK(r.s->state() == State::kAwaitFinish);
  }
}

TEST_CASE("client policy rejects the server name") {
  Fixture f;
  auto cc = f.client_cfg(AuthMode::kCacheable);
  cc.policy = PrefixPolicy::parse("dev.v.io/u/Alice/Laptop");
  auto r = handshake(cc, f.server_cfg(AuthMode::kCacheable), f.w.rng);
  CHECK(r.c->abort_reason() == AbortReason::kPolicy);
  CHECK_FALSE(r.m3);
}

TEST_CASE("server policy rejects the client name") {
  Fixture f;
  auto sc = f.server_cfg(AuthMode::kSigmaBaseline);
  sc.policy = PrefixPolicy::parse("dev.v.io/u/Bob");
  auto r = handshake(f.client_cfg(AuthMode::kSigmaBaseline), sc, f.w.rng);
  CHECK(r.c->state() == State::kComplete);
  CHECK(r.s->state() == State::kAborted);
  CHECK(r.s->abort_reason() == AbortReason::kPolicy);
}

TEST_CASE("untrusted roots fail chain validation") {
  Fixture f;
  privdisc::testing::World other(73);
  auto cc = f.client_cfg(AuthMode::kSigmaBaseline);
  cc.anchors = other.anchors;
  auto r = handshake(cc, f.server_cfg(AuthMode::kSigmaBaseline), f.w.rng);
  CHECK(r.c->abort_reason() == AbortReason::kBadChain);
}

TEST_CASE("response tampering") {
  Fixture f;
  for (auto mode : {AuthMode::kCacheable, AuthMode::kSigmaBaseline}) {
    ClientSession c(f.client_cfg(mode));
    ServerSession s(f.server_cfg(mode));
    auto m2 = *s.on_init(c.start(f.w.rng), f.w.rng);
    m2.sealed[m2.sealed.size() / 2] ^= 4;
    CHECK_FALSE(c.on_response(m2));
    CHECK(c.abort_reason() == AbortReason::kAeadFailure);
  }
  {
    ClientSession c(f.client_cfg(AuthMode::kCacheable));
    ServerSession s(f.server_cfg(AuthMode::kCacheable));
    auto m2 = *s.on_init(c.start(f.w.rng), f.w.rng);
    m2.sid[0] ^= 1;
    CHECK_FALSE(c.on_response(m2));
    CHECK(c.abort_reason() == AbortReason::kSessionMismatch);
  }
  {
    ClientSession c(f.client_cfg(AuthMode::kCacheable));
    ServerSession s(f.server_cfg(AuthMode::kSigmaBaseline));
    auto m2 = *s.on_init(c.start(f.w.rng), f.w.rng);
    CHECK_FALSE(c.on_response(m2));
    CHECK(c.abort_reason() == AbortReason::kModeMismatch);
  }
  {
    // Substituting a fresh DH share breaks the transcript signature.
    ClientSession c(f.client_cfg(AuthMode::kSigmaBaseline));
    ServerSession s(f.server_cfg(AuthMode::kSigmaBaseline));
    auto m2 = *s.on_init(c.start(f.w.rng), f.w.rng);
    m2.gy = dh::Exponent::random(f.w.rng).public_element();
    CHECK_FALSE(c.on_response(m2));
    CHECK(c.state() == State::kAborted);
  }
}

TEST_CASE("finish tampering and replay") {
  Fixture f;
  ClientSession c(f.client_cfg(AuthMode::kCacheable));
  ServerSession s(f.server_cfg(AuthMode::kCacheable));
  auto m2 = *s.on_init(c.start(f.w.rng), f.w.rng);
  auto m3 = *c.on_response(m2);
  auto bad = m3;
  bad.sealed[3] ^= 0x80;
  CHECK_FALSE(s.on_finish(bad));
  CHECK(s.abort_reason() == AbortReason::kAeadFailure);

  // A finish message from one session does not complete another.
  ClientSession c2(f.client_cfg(AuthMode::kCacheable));
  ServerSession s2(f.server_cfg(AuthMode::kCacheable));
  auto m2b = *s2.on_init(c2.start(f.w.rng), f.w.rng);
  (void)m2b;
  auto spliced = m3;
  spliced.sid = s2.sid();
  CHECK_FALSE(s2.on_finish(spliced));
  CHECK(s2.state() == State::kAborted);
}

TEST_CASE("completed sessions ignore late messages") {
  Fixture f;
  auto r = handshake(f.client_cfg(AuthMode::kCacheable), f.server_cfg(AuthMode::kCacheable), f.w.rng);
  CHECK_FALSE(r.c->on_response(*r.m2));
  CHECK(r.c->state() == State::kComplete);
  CHECK_FALSE(r.s->on_finish(*r.m3));
  CHECK(r.s->state() == State::kComplete);
  CHECK_FALSE(r.s->on_init(r.m1, f.w.rng));
  CHECK(r.s->state() == State::kComplete);
}

TEST_CASE("out-of-order use aborts") {
  Fixture f;
  ServerSession s(f.server_cfg(AuthMode::kCacheable));
  CHECK_FALSE(s.on_finish(M3{}));
  CHECK(s.abort_reason() == AbortReason::kBadState);
}

TEST_CASE("application records") {
  Fixture f;
  auto r = handshake(f.client_cfg(AuthMode::kCacheable), f.server_cfg(AuthMode::kCacheable), f.w.rng);
  const Key32 atk = r.c->output()->keys.atk;
  const auto rec = seal_app(atk, r.c->sid(), true, 3, as_bytes("file bytes"));
  CHECK(*open_app(atk, true, rec) == to_bytes("file bytes"));
  CHECK_FALSE(open_app(atk, false, rec));
  auto moved = rec;
  moved.seq = 4;
  CHECK_FALSE(open_app(atk, true, moved));
  moved = rec;
  moved.sid[0] ^= 1;
  CHECK_FALSE(open_app(atk, true, moved));
  CHECK_FALSE(open_app(r.c->output()->keys.htk, true, rec));
}

TEST_CASE("cached identity is reused across sessions") {
  Fixture f;
  const auto cached = make_cached_identity(*f.server, f.w.rng);
  CHECK(cached->ct_s.policy.str() == "dev.v.io/u/Alice");
  CHECK(cached->ct_s_body == wire::encode_body(cached->ct_s));
  for (int i = 0; i < 3; ++i) {
    auto r = handshake(f.client_cfg(AuthMode::kCacheable), f.server_cfg(AuthMode::kCacheable), f.w.rng, cached);
    CHECK(r.c->state() == State::kComplete);
  }
}

TEST_CASE("unlinkable responses share no ciphertext") {
  Fixture f;
  for (int i = 0; i < 10; ++i) {
    auto a = handshake(f.client_cfg(AuthMode::kUnlinkable), f.server_cfg(AuthMode::kUnlinkable), f.w.rng);
    auto b = handshake(f.client_cfg(AuthMode::kUnlinkable), f.server_cfg(AuthMode::kUnlinkable), f.w.rng);
    REQUIRE(a.m2->wrapped);
    CHECK(a.m2->wrapped->policy == b.m2->wrapped->policy);
    CHECK_FALSE(share_substring(m2_ciphertext_bytes(*a.m2), m2_ciphertext_bytes(*b.m2), 16));
  }
}

TEST_CASE("client identity is only ever sent encrypted") {
  Fixture f;
  const Bytes blessing = wire::encode_body(f.client->blessing());
  for (auto mode : {AuthMode::kCacheable, AuthMode::kUnlinkable, AuthMode::kSigmaBaseline}) {
    auto r = handshake(f.client_cfg(mode), f.server_cfg(mode), f.w.rng);
    for (const Bytes& frame : {wire::encode(r.m1), wire::encode(*r.m2), wire::encode(*r.m3)})
      CHECK(count_occurrences(frame, blessing) == 0);
  }
}

TEST_CASE("cached server identity is opaque to non-satisfying key rings") {
  Fixture f;
  const auto cached = make_cached_identity(*f.server, f.w.rng);
  static const char* kFirst[] = {"Bob", "Alicia", "alice", "Carol", "Al"};
  int opaque = 0;
  for (int i = 0; i < 100; ++i) {
    std::string name = "dev.v.io/u/" + std::string(kFirst[i % 5]) + std::to_string(i / 5);
    if (i % 10 == 9) name = "dev.v.io/svc" + std::to_string(i);
    const auto ring = prefix::keyring_extract(*f.w.root.ibe_root, HierName::parse(name), f.w.rng);
    opaque += prefix::pe_dec(ring, cached->ct_s).status == prefix::PeStatus::kNotAuthorized;
  }
  CHECK(opaque == 100);
}

TEST_CASE("a response is bound to its session") {
  Fixture f;
  ClientSession a(f.client_cfg(AuthMode::kCacheable)), b(f.client_cfg(AuthMode::kCacheable));
  ServerSession s(f.server_cfg(AuthMode::kCacheable));
  auto m2 = *s.on_init(a.start(f.w.rng), f.w.rng);
  m2.sid = b.start(f.w.rng).sid;
  CHECK_FALSE(b.on_response(m2));
  CHECK(b.state() == State::kAborted);
}

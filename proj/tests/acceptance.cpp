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


// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <map>
#include <unordered_set>

#include "forge.hpp"
#include "privdisc/bench.hpp"
#include "privdisc/ibe.hpp"
#include "samples.hpp"
#include "scenarios.hpp"

using namespace privdisc;
using namespace privdisc::testing;

namespace {

constexpr std::uint64_t kNow = 1'700'000'000;

struct Result {
  bool pass = true;
  std::string detail;
};

int failures = 0;

Bytes draw_bytes(Entropy& rng, std::size_t n) {
  Bytes out(n);
  rng.fill(out);
  return out;
}

void report(int n, const char* what, const Result& r) {
  std::printf("%s criterion %d: %s (%s)\n", r.pass ? "PASS" : "FAIL", n, what, r.detail.c_str());
  std::fflush(stdout);
  if (!r.pass) ++failures;
}

template <class F>
Result guarded(F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Result ibe_suite() {
  SeededEntropy rng(1001);
  const auto kp = ibe::setup(pairing::GroupParams::bls12_381(), rng);
  int round_trip = 0, wrong_rejected = 0, tamper_rejected = 0, false_accepts = 0;
  for (int i = 0; i < 500; ++i) {
    const std::string id = "id-" + std::to_string(i);
    const auto key = ibe::extract(kp.msk, as_bytes(id), rng);
    const auto other = ibe::extract(kp.msk, as_bytes(id + "x"), rng);
    const Bytes m = draw_bytes(rng, 1 + i % 200);
    const auto ct = ibe::encrypt(kp.mpk, as_bytes(id), m, rng);
    const auto pt = ibe::decrypt(kp.mpk, key, ct);
    round_trip += pt && *pt == m;
    wrong_rejected += !ibe::decrypt(kp.mpk, other, ct);
  }
  const auto key = ibe::extract(kp.msk, as_bytes("tamper"), rng);
  for (int i = 0; i < 1000; ++i) {
    Bytes body = wire::encode_body(ibe::encrypt(kp.mpk, as_bytes("tamper"), draw_bytes(rng, 48), rng));
    const std::size_t bit = draw_u64(rng) % (body.size() * 8);
    body[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    bool rejected = true;
    try {
      rejected = !ibe::decrypt(kp.mpk, key, wire::decode_body<ibe::Ciphertext>(body));
    } catch (const Error&) {
    }
    tamper_rejected += rejected;
    false_accepts += !rejected;
  }
  return {round_trip == 500 && wrong_rejected == 500 && tamper_rejected == 1000 && false_accepts == 0,
          fmt("round trip %d/500, wrong identity rejected %d/500, tamper rejected %d/1000, false accepts %d",
              round_trip, wrong_rejected, tamper_rejected, false_accepts)};
}

std::vector<std::string> random_components(Entropy& rng, std::size_t max_depth) {
  static const char* kAlphabet[] = {"a", "ab", "b", "c"};
  const std::size_t depth = 1 + draw_u64(rng) % max_depth;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < depth; ++i) out.emplace_back(kAlphabet[draw_u64(rng) % 4]);
  return out;
}

bool oracle_satisfies(const std::vector<std::string>& name, const std::vector<std::vector<std::string>>& policy) {
  for (const auto& p : policy) {
    if (p.size() > name.size()) continue;
    bool match = true;
    for (std::size_t i = 0; i < p.size(); ++i) match = match && p[i] == name[i];
    if (match) return true;
  }
  return false;
}

Result prefix_oracle() {
  World w(1002, "r");
  std::map<std::string, prefix::PrefixKeyRing> rings;
  int disagreements = 0, authorized = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::vector<std::string>> raw;
    std::vector<HierName> prefixes;
    for (int k = 0, n = 1 + static_cast<int>(draw_u64(w.rng) % 3); k < n; ++k) {
      auto c = random_components(w.rng, 4);
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
    const bool expected = oracle_satisfies(name, raw);
    authorized += expected;
    if (res.ok() != expected || (res.ok() && res.payload != to_bytes("payload"))) ++disagreements;
  }
  return {disagreements == 0, fmt("1000 pairs, %d authorized, %d disagreements", authorized, disagreements)};
}

Result mutual_auth_suite() {
  using namespace mutual_auth;
  World w(1003);
  static constexpr AuthMode kModes[] = {AuthMode::kCacheable, AuthMode::kUnlinkable, AuthMode::kSigmaBaseline};
  std::vector<std::shared_ptr<const Principal>> clients, servers;
  for (const char* n : {"dev.v.io/u/Alice/Phone", "dev.v.io/u/Bob/Laptop", "dev.v.io/u/Carol", "dev.v.io/guest"})
    clients.push_back(w.member(n, "dev.v.io"));
  for (const char* n : {"dev.v.io/u/Alice/TV", "dev.v.io/svc/printer", "dev.v.io/u/Dan/Devices/NAS"})
    servers.push_back(w.member(n, "dev.v.io"));
  std::vector<std::shared_ptr<const CachedServerIdentity>> cached;
  for (const auto& s : servers) cached.push_back(make_cached_identity(*s, w.rng));
  const auto any = PrefixPolicy::parse("dev.v.io");

  int honest_ok = 0;
  for (int i = 0; i < 500; ++i) {
    const auto ci = draw_u64(w.rng) % clients.size(), si = draw_u64(w.rng) % servers.size();
    const auto mode = kModes[draw_u64(w.rng) % 3];
    ClientSession c({clients[ci], w.anchors, any, mode});
    ServerSession s({servers[si], w.anchors, any, mode}, mode == AuthMode::kCacheable ? cached[si] : nullptr);
    const auto m2 = s.on_init(c.start(w.rng), w.rng);
    const auto m3 = m2 ? c.on_response(*m2) : std::nullopt;
    const bool done = m3 && s.on_finish(*m3);
    honest_ok += done && c.state() == State::kComplete && s.state() == State::kComplete &&
                 c.output()->keys == s.output()->keys && *c.reveal_keys() == *s.reveal_keys() &&
                 c.output()->peer == servers[si]->name() && s.output()->peer == clients[ci]->name();
  }

  MaWorld mw;
  int adversarial_ok = 0, client_aborts = 0, blessing_leaks = 0;
  std::string first_failure;
  for (std::uint64_t n = 0; n < 200; ++n) {
    const auto c = make_adversarial_case(mw, n);
    auto f = mw.fabric(c.seed, c.mode);
    const auto r = f.run(c.script);
    const auto o = evaluate(mw, c, r);
    if (passed(o)) {
      ++adversarial_ok;
    } else if (first_failure.empty()) {
      first_failure = std::string(" first failure ") + attack_name(c.attack) + ": " + o.failure;
    }
    for (const auto& l : session_lines(*r.party("client")))
      if (l.state == "aborted") {
        ++client_aborts;
        blessing_leaks += simnet::transcript_scan(r.transcript, mw.client_blessing()) != 0;
      }
  }
  return {honest_ok == 500 && adversarial_ok == 200 && blessing_leaks == 0,
          fmt("honest %d/500, adversarial aborted %d/200, client aborts %d with %d blessing leaks%s", honest_ok,
              adversarial_ok, client_aborts, blessing_leaks, first_failure.c_str())};
}

bool share_substring(ByteView a, ByteView b, std::size_t len) {
  if (a.size() < len || b.size() < len) return false;
  std::unordered_set<std::string> windows;
  for (std::size_t i = 0; i + len <= a.size(); ++i) windows.emplace(reinterpret_cast<const char*>(a.data() + i), len);
  for (std::size_t i = 0; i + len <= b.size(); ++i)
    if (windows.count(std::string(reinterpret_cast<const char*>(b.data() + i), len))) return true;
  return false;
}

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

Result unlinkable() {
  using namespace mutual_auth;
  World w(1004);
  const auto client = w.member("dev.v.io/u/Alice/Phone", "dev.v.io/u");
  const auto server = w.member("dev.v.io/u/Alice/TV", "dev.v.io/u/Alice");
  const auto any = PrefixPolicy::parse("dev.v.io");
  const auto m2_of = [&] {
    ClientSession c({client, w.anchors, any, AuthMode::kUnlinkable});
    ServerSession s({server, w.anchors, any, AuthMode::kUnlinkable});
    auto m2 = s.on_init(c.start(w.rng), w.rng);
    if (!m2 || !c.on_response(*m2)) throw std::runtime_error("unlinkable handshake failed");
    return *m2;
  };
  int linked = 0;
  std::size_t bytes = 0;
  for (int i = 0; i < 50; ++i) {
    const auto a = m2_of(), b = m2_of();
    const Bytes ca = m2_ciphertext_bytes(a), cb = m2_ciphertext_bytes(b);
    bytes = ca.size();
    linked += share_substring(ca, cb, 16);
  }
  return {linked == 0, fmt("50 pairs, %zu ciphertext bytes per M2, %d linked", bytes, linked)};
}

Result discovery_suite() {
  using namespace discovery;
  World w(1005);
  const auto server = w.member("dev.v.io/u/TV");
  const auto phone = w.member("dev.v.io/u/Alice/Phone");
  const auto audience = PrefixPolicy::parse("dev.v.io/u/Alice");
  const ClientConfig cfg{phone, w.anchors, PrefixPolicy::parse("dev.v.io")};
  BroadcastServer bs({server, w.anchors});

  bool honest = false;
  {
    const auto found = process_broadcast(cfg, wire::encode(bs.make_broadcast(audience, 600, kNow, w.rng)), kNow);
    if (found.ok()) {
      ClientConnection conn(cfg, *found.service);
      const auto f1 = conn.connect(as_bytes("early hello"), kNow, w.rng);
      const auto acc = bs.accept(*f1, kNow, w.rng, as_bytes("reply"));
      honest = acc.ok() && acc.early_data == to_bytes("early hello") && conn.on_response(*acc.f2) &&
               conn.atk() == acc.atk && conn.reply() == to_bytes("reply");
    }
  }

  int replay_rejected = 0, expiry_rejected = 0;
  const auto b = bs.make_broadcast(audience, 600, kNow, w.rng);
  const auto found = process_broadcast(cfg, b, kNow);
  for (int i = 0; i < 100; ++i) {
    ClientConnection conn(cfg, *found.service);
    const auto f1 = conn.connect(as_bytes("x"), kNow, w.rng);
    bs.accept(*f1, kNow, w.rng);
    replay_rejected += bs.accept(*f1, kNow + 1, w.rng).status == AcceptStatus::kReplay;
  }
  for (int i = 0; i < 100; ++i) {
    const auto fresh = bs.make_broadcast(audience, 1 + i, kNow, w.rng);
    expiry_rejected += process_broadcast(cfg, fresh, kNow + 1 + i + (i % 7) * 50).status == DiscoverStatus::kExpired;
  }

  const char* fields[] = {"bid", "id", "g^s", "expiry"};
  int mutated_rejected[4] = {0, 0, 0, 0};
  int controls = 0;
  const auto other = w.member("dev.v.io/u/Printer");
  for (int i = 0; i < 100; ++i) {
    const auto g = genuine_fields(*server, kNow + 600, w.rng);
    controls += process_broadcast(cfg, forge_broadcast(*server, audience, g, g, w.rng), kNow).ok();
    for (int f = 0; f < 4; ++f) {
      auto m = g;
      switch (f) {
        case 0: m.bid[draw_u64(w.rng) % m.bid.size()] ^= static_cast<std::uint8_t>(1 + draw_u64(w.rng) % 255); break;
        case 1: m.blessing = wire::encode_body(other->blessing()); break;
        case 2: m.gs = dh::Exponent::random(w.rng).public_element(); break;
        case 3: m.expiry += 1 + draw_u64(w.rng) % 100000; break;
      }
      mutated_rejected[f] +=
          process_broadcast(cfg, forge_broadcast(*server, audience, g, m, w.rng), kNow).status ==
          DiscoverStatus::kBadSignature;
    }
  }
  bool all_fields = true;
  std::string per_field;
  for (int f = 0; f < 4; ++f) {
    all_fields = all_fields && mutated_rejected[f] == 100;
    per_field += fmt(" %s %d/100", fields[f], mutated_rejected[f]);
  }
  return {honest && replay_rejected == 100 && expiry_rejected == 100 && all_fields && controls == 100,
          fmt("honest 0-RTT %s, replay rejected %d/100, expired rejected %d/100, unmutated controls %d/100, "
              "mutations rejected:%s",
              honest ? "ok" : "failed", replay_rejected, expiry_rejected, controls, per_field.c_str())};
}

Result pfs_window() {
  using namespace discovery;
  World w(1006);
  const auto server = w.member("dev.v.io/u/TV");
  const auto phone = w.member("dev.v.io/u/Alice/Phone");
  const ClientConfig cfg{phone, w.anchors, PrefixPolicy::parse("dev.v.io")};
  BroadcastServer bs({server, w.anchors});
  const auto b = bs.make_broadcast(PrefixPolicy::parse("dev.v.io/u/Alice"), 600, kNow, w.rng);
  const auto found = process_broadcast(cfg, b, kNow);
  ClientConnection conn(cfg, *found.service);
  const auto f1 = *conn.connect(as_bytes("early application data"), kNow, w.rng);
  const auto acc = bs.accept(f1, kNow, w.rng, as_bytes("application data under atk"));
  if (!acc.ok() || !conn.on_response(*acc.f2)) return {false, "exchange failed"};
  const auto s = bs.reveal_semi_static(b.bid);
  if (!s) return {false, "semi-static secret not available"};
  const auto rep = demonstrate_pfs_window(f1, *acc.f2, *s);
  const bool early = rep.early_data_recovered && rep.early_data == to_bytes("early application data");
  return {early && !rep.app_data_recovered,
          fmt("early data recovered: %s (expected yes); atk payload recovered: %s (expected no)",
              early ? "yes" : "no", rep.app_data_recovered ? "yes" : "no")};
}

Result sizes() {
  World w(1007);
  const auto server = w.member("dev.v.io/u/TV");
  discovery::BroadcastServer bs({server, w.anchors});
  const Bytes bytes = wire::encode(bs.make_broadcast(PrefixPolicy::parse("dev.v.io/u/Alice"), 600, kNow, w.rng));
  wire::Endpoint ep;
  ep.address[15] = 1;
  ep.port = 8080;
  const auto ble = wire::to_ble_pointer(ep);
  const bool ble_ok = ble.size() == 31 && wire::from_ble_pointer(ble) == ep;
  const std::size_t certs = server->blessing().chain.size();
  return {certs == 3 && bytes.size() <= wire::kMdnsBudget && ble_ok,
          fmt("%zu-certificate single-prefix advertisement %zu bytes (budget %zu), BLE pointer %zu bytes", certs,
              bytes.size(), wire::kMdnsBudget, ble.size())};
}

Result bench_structure() {
  SeededEntropy rng(1008);
  const auto ibe_rows = bench::ibe(bench::kMinIterations, rng);
  const auto hs_rows = bench::handshake(bench::kMinIterations, rng);
  const auto* enc = bench::find(ibe_rows, "Encrypt");
  const auto* dec = bench::find(ibe_rows, "Decrypt");
  const auto* ext = bench::find(ibe_rows, "Extract");
  const auto* slow = bench::find(hs_rows, "Slowdown");
  if (!enc || !dec || !ext || !slow || !bench::find(ibe_rows, "Pairing")) return {false, "missing rows"};
  const bool order = dec->value > enc->value && enc->value > ext->value;
  const bool ratio = slow->value > 1.0 && slow->value < 12.0;
  return {order && ratio, fmt("decrypt %.3f > encrypt %.3f > extract %.3f ms: %s; slowdown %.2fx in (1, 12): %s",
                              dec->value, enc->value, ext->value, order ? "yes" : "no", slow->value,
                              ratio ? "yes" : "no")};
}

Result wire_determinism() {
  std::size_t objects = 0, identical = 0, truncations = 0, truncations_rejected = 0;
  for (std::uint64_t seed = 1; objects < 1000; ++seed) {
    for (const auto& frame : sample_frames(seed)) {
      if (objects == 1000) break;
      ++objects;
      identical += reencode(frame) == frame;
      for (std::size_t n = 0; n < frame.size(); ++n) {
        ++truncations;
        try {
          reencode(ByteView(frame).first(n));
        } catch (const Error&) {
          ++truncations_rejected;
        }
      }
    }
  }
  return {identical == 1000 && truncations == truncations_rejected,
          fmt("%zu/1000 objects round trip, %zu/%zu truncations rejected", identical, truncations_rejected,
              truncations)};
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  report(1, "IBE property suite", guarded(ibe_suite));
  report(2, "prefix matching oracle", guarded(prefix_oracle));
  report(3, "mutual authentication", guarded(mutual_auth_suite));
  report(4, "unlinkable responses", guarded(unlinkable));
  report(5, "discovery", guarded(discovery_suite));
  report(6, "forward secrecy window", guarded(pfs_window));
  report(7, "size budget", guarded(sizes));
  report(8, "benchmark structure", guarded(bench_structure));
  report(9, "wire determinism", guarded(wire_determinism));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of 9 criteria failed in %.1f s\n", failures, secs);
  return failures == 0 ? 0 : 1;
}

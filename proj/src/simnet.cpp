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


#include "privdisc/simnet.hpp"

#include <charconv>
#include <sstream>

namespace privdisc::simnet {

namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

template <class T>
T parse_number(const std::string& s, int base, std::size_t line_no) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw Error(Errc::kMalformed, "script line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return v;
}

std::string kind_of(ByteView bytes) {
  try {
    return wire::frame_type_name(wire::peek_type(bytes));
  } catch (const Error&) {
    return "raw";
  }
}

std::string short_hex(ByteView b) { return to_hex(b.first(std::min<std::size_t>(b.size(), 8))); }

}  // namespace

// ---- scripts ----

Script parse_script(std::string_view text) {
  Script out;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    auto need = [&](std::size_t n) {
      if (tok.size() != n)
        throw Error(Errc::kMalformed, "script line " + std::to_string(line_no) + ": wrong argument count");
    };
    Action a;
    const std::string& op = tok[0];
    if (op == "deliver") {
      need(1);
      a.kind = Action::Kind::kDeliver;
    } else if (op == "drop") {
      need(1);
      a.kind = Action::Kind::kDrop;
    } else if (op == "defer") {
      need(1);
      a.kind = Action::Kind::kDefer;
    } else if (op == "redirect") {
      need(2);
      a.kind = Action::Kind::kRedirect;
      a.party = tok[1];
    } else if (op == "mutate") {
      need(3);
      a.kind = Action::Kind::kMutate;
      a.offset = parse_number<std::size_t>(tok[1], 10, line_no);
      a.xor_mask = parse_number<std::uint8_t>(tok[2], 16, line_no);
      if (a.xor_mask == 0) throw Error(Errc::kMalformed, "script line " + std::to_string(line_no) + ": zero xor");
    } else if (op == "replay") {
      need(2);
      a.kind = Action::Kind::kReplay;
      a.offset = parse_number<std::size_t>(tok[1], 10, line_no);
    } else if (op == "inject") {
      need(3);
      a.kind = Action::Kind::kInject;
      a.party = tok[1];
      a.bytes = from_hex(tok[2]);
    } else if (op == "delay") {
      need(2);
      a.kind = Action::Kind::kDelay;
      a.seconds = parse_number<std::uint64_t>(tok[1], 10, line_no);
    } else {
      throw Error(Errc::kMalformed, "script line " + std::to_string(line_no) + ": unknown action '" + op + "'");
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::string script_to_text(const Script& script) {
  std::ostringstream out;
  for (const auto& a : script) {
    switch (a.kind) {
      case Action::Kind::kDeliver: out << "deliver"; break;
      case Action::Kind::kDrop: out << "drop"; break;
      case Action::Kind::kDefer: out << "defer"; break;
      case Action::Kind::kRedirect: out << "redirect " << a.party; break;
      case Action::Kind::kMutate: {
        const std::uint8_t m[1] = {a.xor_mask};
        out << "mutate " << a.offset << ' ' << to_hex(m);
        break;
      }
      case Action::Kind::kReplay: out << "replay " << a.offset; break;
      case Action::Kind::kInject: out << "inject " << a.party << ' ' << to_hex(a.bytes); break;
      case Action::Kind::kDelay: out << "delay " << a.seconds; break;
    }
    out << '\n';
  }
  return out.str();
}

std::size_t transcript_scan(const Transcript& t, ByteView needle) {
  std::size_t n = 0;
  for (const auto& e : t) n += count_occurrences(e.bytes, needle);
  return n;
}

// ---- reports ----

const PartyReport* ScenarioReport::party(std::string_view name) const {
  for (const auto& p : parties)
    if (p.name == name) return &p;
  return nullptr;
}

std::string ScenarioReport::to_text() const {
  std::ostringstream out;
  out << "transcript " << transcript.size() << '\n';
  for (const auto& e : transcript) {
    out << "frame " << e.index << " t=" << e.time << ' ' << e.from << " -> " << e.to << ' ' << e.kind << ' '
        << (e.delivered ? "delivered" : "undelivered") << (e.forged ? " forged" : "") << ' ' << to_hex(e.bytes)
        << '\n';
  }
  for (const auto& p : parties) {
    out << "party " << p.name << ' ' << p.lines.size() << '\n';
    for (const auto& l : p.lines) out << "  " << l << '\n';
  }
  for (const auto& [name, cap] : eavesdroppers) out << "eavesdropper " << name << " frames=" << cap.size() << '\n';
  return out.str();
}

// ---- hooks ----

std::optional<Bytes> CompromiseHooks::reveal_session_state(const std::string& party, const SessionId& sid) const {
  const Party* p = fabric_.find(party);
  return p ? p->reveal_session_state(sid) : std::nullopt;
}

std::optional<Bytes> CompromiseHooks::reveal_broadcast(const std::string& party, const BroadcastId& bid) const {
  const Party* p = fabric_.find(party);
  return p ? p->reveal_broadcast(bid) : std::nullopt;
}

std::optional<Key32> CompromiseHooks::reveal_key(const std::string& party, const SessionId& sid) const {
  const Party* p = fabric_.find(party);
  return p ? p->reveal_key(sid) : std::nullopt;
}

std::optional<Corruption> CompromiseHooks::corrupt(const std::string& party) const {
  const Party* p = fabric_.find(party);
  return p ? p->corrupt() : std::nullopt;
}

// ---- fabric ----

Fabric::Fabric(std::uint64_t seed, std::uint64_t start_time) : entropy_(seed), now_(start_time) {}

void Fabric::add_party(const std::string& name, std::shared_ptr<Party> party) {
  if (find(name) || name == kAdversary) throw Error(Errc::kMalformed, "duplicate party '" + name + "'");
  parties_.emplace_back(name, std::move(party));
}

void Fabric::add_eavesdropper(const std::string& name) {
  eavesdroppers_.push_back(name);
  captures_[name];
}

const Party* Fabric::find(const std::string& name) const {
  for (const auto& [n, p] : parties_)
    if (n == name) return p.get();
  return nullptr;
}

void Fabric::require_party(const std::string& name) const {
  if (!find(name)) throw Error(Errc::kMalformed, "script references unknown party '" + name + "'");
}

std::size_t Fabric::send(const std::string& from, const std::string& to, Bytes bytes, bool forged) {
  TranscriptEntry e{transcript_.size(), now_, from, to, kind_of(bytes), false, forged, std::move(bytes)};
  for (const auto& name : eavesdroppers_) captures_[name].push_back(e);
  transcript_.push_back(std::move(e));
  return transcript_.size() - 1;
}

void Fabric::deliver_head() {
  const std::size_t idx = queue_.front();
  queue_.pop_front();
  transcript_[idx].delivered = true;
  const std::string from = transcript_[idx].from;
  const std::string to = transcript_[idx].to;
  const Bytes bytes = transcript_[idx].bytes;
  for (auto& [name, party] : parties_) {
    if (name != to) continue;
    Context ctx{now_, entropy_};
    for (auto& out : party->on_frame(from, bytes, ctx)) queue_.push_back(send(name, out.to, std::move(out.bytes), false));
  }
}

void Fabric::tick_all() {
  for (auto& [name, party] : parties_) party->on_tick(now_);
}

ScenarioReport Fabric::run(const Script& script) {
  for (const auto& a : script)
    if (a.kind == Action::Kind::kRedirect || a.kind == Action::Kind::kInject) require_party(a.party);

  for (auto& [name, party] : parties_) {
    Context ctx{now_, entropy_};
    for (auto& out : party->start(ctx)) queue_.push_back(send(name, out.to, std::move(out.bytes), false));
  }
  notify();

  for (const auto& a : script) {
    switch (a.kind) {
      case Action::Kind::kDeliver:
        if (!queue_.empty()) deliver_head();
        break;
      case Action::Kind::kDrop:
        if (!queue_.empty()) queue_.pop_front();
        break;
      case Action::Kind::kDefer:
        if (!queue_.empty()) {
          queue_.push_back(queue_.front());
          queue_.pop_front();
        }
        break;
      case Action::Kind::kRedirect:
        if (!queue_.empty()) {
          const auto& head = transcript_[queue_.front()];
          Bytes copy = head.bytes;
          const std::string from = head.from;
          queue_.front() = send(from, a.party, std::move(copy), true);
        }
        break;
      case Action::Kind::kMutate:
        if (!queue_.empty()) {
          const auto& head = transcript_[queue_.front()];
          Bytes copy = head.bytes;
          if (!copy.empty()) copy[a.offset % copy.size()] ^= a.xor_mask;
          const std::string from = head.from, to = head.to;
          queue_.front() = send(from, to, std::move(copy), true);
        }
        break;
      case Action::Kind::kReplay: {
        if (a.offset >= transcript_.size())
          throw Error(Errc::kMalformed, "replay of unknown transcript entry " + std::to_string(a.offset));
        const auto& e = transcript_[a.offset];
        Bytes copy = e.bytes;
        const std::string from = e.from, to = e.to;
        queue_.push_front(send(from, to, std::move(copy), true));
        break;
      }
      case Action::Kind::kInject:
        queue_.push_front(send(std::string(kAdversary), a.party, a.bytes, true));
        break;
      case Action::Kind::kDelay:
        now_ += a.seconds;
        tick_all();
        break;
    }
    notify();
  }

  // Bound the drain so misbehaving parties cannot loop forever.
  for (std::size_t steps = 0; !queue_.empty() && steps < 100000; ++steps) {
    deliver_head();
    notify();
  }
  now_ += kSessionTimeout;
  tick_all();
  notify();

  ScenarioReport rep;
  rep.transcript = transcript_;
  for (const auto& [name, party] : parties_) rep.parties.push_back({name, party->output()});
  rep.eavesdroppers = captures_;
  return rep;
}

// ---- mutual authentication parties ----

namespace {

std::string session_line(const SessionId& sid, mutual_auth::State st, mutual_auth::AbortReason reason,
                         const std::optional<mutual_auth::SessionOutput>& out) {
  std::string line = "session " + to_hex(sid) + ' ' + mutual_auth::state_name(st);
  if (out) line += " peer=" + out->peer.str() + " atk=" + short_hex(out->keys.atk);
  if (st == mutual_auth::State::kAborted) line += std::string(" reason=") + mutual_auth::abort_reason_name(reason);
  return line;
}

Corruption corruption_of(const Principal& p) {
  Corruption c{p.keypair, std::nullopt};
  if (p.keyring()) c.keyring = *p.keyring();
  return c;
}

template <class T>
std::optional<T> try_decode(ByteView bytes) {
  try {
    return wire::decode<T>(bytes);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<wire::FrameType> try_peek(ByteView bytes) {
  try {
    return wire::peek_type(bytes);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

MutualAuthClientParty::MutualAuthClientParty(std::string server, mutual_auth::Config cfg, std::size_t sessions)
    : server_(std::move(server)), cfg_(std::move(cfg)), count_(sessions) {}

std::vector<Outbound> MutualAuthClientParty::start(Context& ctx) {
  std::vector<Outbound> out;
  last_activity_ = ctx.now;
  for (std::size_t i = 0; i < count_; ++i) {
    sessions_.push_back(std::make_unique<mutual_auth::ClientSession>(cfg_));
    out.push_back({server_, wire::encode(sessions_.back()->start(ctx.entropy))});
  }
  return out;
}

std::vector<Outbound> MutualAuthClientParty::on_frame(const std::string& from, ByteView bytes, Context& ctx) {
  auto m2 = try_decode<M2>(bytes);
  if (!m2) return {};
  for (auto& s : sessions_) {
    if (s->sid() != m2->sid) continue;
    last_activity_ = ctx.now;
    if (auto m3 = s->on_response(*m2)) return {{from, wire::encode(*m3)}};
    return {};
  }
  return {};
}

void MutualAuthClientParty::on_tick(std::uint64_t now) {
  if (now - last_activity_ < kSessionTimeout) return;
  for (auto& s : sessions_) s->abort(mutual_auth::AbortReason::kTimeout);
}

std::vector<std::string> MutualAuthClientParty::output() const {
  std::vector<std::string> out;
  for (const auto& s : sessions_) out.push_back(session_line(s->sid(), s->state(), s->abort_reason(), s->output()));
  return out;
}

const mutual_auth::ClientSession* MutualAuthClientParty::find(const SessionId& sid) const {
  for (const auto& s : sessions_)
    if (s->sid() == sid) return s.get();
  return nullptr;
}

std::optional<Bytes> MutualAuthClientParty::reveal_session_state(const SessionId& sid) const {
  const auto* s = find(sid);
  if (!s) return std::nullopt;
  auto x = s->reveal_ephemeral();
  if (!x) return std::nullopt;
  return Bytes(x->bytes().begin(), x->bytes().end());
}

std::optional<Key32> MutualAuthClientParty::reveal_key(const SessionId& sid) const {
  const auto* s = find(sid);
  if (!s || !s->output()) return std::nullopt;
  return s->output()->keys.atk;
}

std::optional<Corruption> MutualAuthClientParty::corrupt() const { return corruption_of(*cfg_.principal); }

MutualAuthServerParty::MutualAuthServerParty(mutual_auth::Config cfg,
                                             std::shared_ptr<const mutual_auth::CachedServerIdentity> cached)
    : cfg_(std::move(cfg)), cached_(std::move(cached)) {}

std::vector<Outbound> MutualAuthServerParty::on_frame(const std::string& from, ByteView bytes, Context& ctx) {
  auto type = try_peek(bytes);
  if (type == wire::FrameType::kM1) {
    auto m1 = try_decode<M1>(bytes);
    if (!m1 || sessions_.count(m1->sid)) return {};
    auto s = std::make_unique<mutual_auth::ServerSession>(cfg_, cached_);
    auto m2 = s->on_init(*m1, ctx.entropy);
    started_[m1->sid] = ctx.now;
    sessions_.emplace(m1->sid, std::move(s));
    if (!m2) return {};
    return {{from, wire::encode(*m2)}};
  }
  if (type == wire::FrameType::kM3) {
    auto m3 = try_decode<M3>(bytes);
    if (!m3) return {};
    auto it = sessions_.find(m3->sid);
    if (it != sessions_.end()) it->second->on_finish(*m3);
  }
  return {};
}

void MutualAuthServerParty::on_tick(std::uint64_t now) {
  for (auto& [sid, s] : sessions_)
    if (now - started_[sid] >= kSessionTimeout) s->abort(mutual_auth::AbortReason::kTimeout);
}

std::vector<std::string> MutualAuthServerParty::output() const {
  std::vector<std::string> out;
  for (const auto& [sid, s] : sessions_) out.push_back(session_line(sid, s->state(), s->abort_reason(), s->output()));
  return out;
}

std::optional<Bytes> MutualAuthServerParty::reveal_session_state(const SessionId& sid) const {
  auto it = sessions_.find(sid);
  if (it == sessions_.end()) return std::nullopt;
  auto y = it->second->reveal_ephemeral();
  if (!y) return std::nullopt;
  return Bytes(y->bytes().begin(), y->bytes().end());
}

std::optional<Key32> MutualAuthServerParty::reveal_key(const SessionId& sid) const {
  auto it = sessions_.find(sid);
  if (it == sessions_.end() || !it->second->output()) return std::nullopt;
  return it->second->output()->keys.atk;
}

std::optional<Corruption> MutualAuthServerParty::corrupt() const { return corruption_of(*cfg_.principal); }

// ---- discovery parties ----

DiscoveryServerParty::DiscoveryServerParty(discovery::ServerConfig cfg, PrefixPolicy policy,
                                           std::vector<std::string> audience, std::uint64_t ttl,
                                           std::optional<Bytes> reply)
    : principal_(cfg.principal),
      server_(std::move(cfg)),
      policy_(std::move(policy)),
      audience_(std::move(audience)),
      ttl_(ttl),
      reply_(std::move(reply)) {}

std::vector<Outbound> DiscoveryServerParty::start(Context& ctx) {
  const Bytes b = wire::encode(server_.make_broadcast(policy_, ttl_, ctx.now, ctx.entropy));
  log_.push_back("broadcast bid=" + to_hex(*server_.current_bid()) + " size=" + std::to_string(b.size()));
  std::vector<Outbound> out;
  for (const auto& to : audience_) out.push_back({to, b});
  return out;
}

std::vector<Outbound> DiscoveryServerParty::on_frame(const std::string& from, ByteView bytes, Context& ctx) {
  auto f1 = try_decode<F1>(bytes);
  if (!f1) return {};
  std::optional<ByteView> reply;
  if (reply_) reply = ByteView(*reply_);
  auto res = server_.accept(*f1, ctx.now, ctx.entropy, reply);
  std::string line = "accept sid=" + to_hex(f1->sid) + ' ' + discovery::accept_status_name(res.status);
  if (!res.ok()) {
    log_.push_back(line);
    return {};
  }
  line += " peer=" + res.client_name->str() + " atk=" + short_hex(res.atk);
  if (res.early_data) line += " early=" + to_hex(*res.early_data);
  log_.push_back(line);
  keys_[f1->sid] = res.atk;
  return {{from, wire::encode(*res.f2)}};
}

std::vector<std::string> DiscoveryServerParty::output() const { return log_; }

std::optional<Bytes> DiscoveryServerParty::reveal_broadcast(const BroadcastId& bid) const {
  auto s = server_.reveal_semi_static(bid);
  if (!s) return std::nullopt;
  return Bytes(s->bytes().begin(), s->bytes().end());
}

std::optional<Key32> DiscoveryServerParty::reveal_key(const SessionId& sid) const {
  auto it = keys_.find(sid);
  if (it == keys_.end()) return std::nullopt;
  return it->second;
}

std::optional<Corruption> DiscoveryServerParty::corrupt() const { return corruption_of(*principal_); }

DiscoveryClientParty::DiscoveryClientParty(discovery::ClientConfig cfg, std::optional<Bytes> early_data)
    : cfg_(std::move(cfg)), early_data_(std::move(early_data)) {}

std::vector<Outbound> DiscoveryClientParty::on_frame(const std::string& from, ByteView bytes, Context& ctx) {
  auto type = try_peek(bytes);
  if (type == wire::FrameType::kBroadcast) {
    auto res = discovery::process_broadcast(cfg_, bytes, ctx.now);
    if (!res.ok()) {
      log_.push_back(std::string("discover ") + discovery::discover_status_name(res.status));
      return {};
    }
    log_.push_back("discover ok server=" + res.service->server_name.str());
    conns_.push_back(std::make_unique<discovery::ClientConnection>(cfg_, *res.service));
    std::optional<ByteView> ed;
    if (early_data_) ed = ByteView(*early_data_);
    auto f1 = conns_.back()->connect(ed, ctx.now, ctx.entropy);
    last_activity_ = ctx.now;
    if (!f1) return {};
    return {{from, wire::encode(*f1)}};
  }
  if (type == wire::FrameType::kF2) {
    auto f2 = try_decode<F2>(bytes);
    if (!f2) return {};
    for (auto& c : conns_) {
      if (c->sid() != f2->sid) continue;
      last_activity_ = ctx.now;
      c->on_response(*f2);
    }
  }
  return {};
}

void DiscoveryClientParty::on_tick(std::uint64_t now) {
  if (now - last_activity_ < kSessionTimeout) return;
  for (auto& c : conns_) c->abort(discovery::ClientAbort::kTimeout);
}

std::vector<std::string> DiscoveryClientParty::output() const {
  std::vector<std::string> out = log_;
  for (const auto& c : conns_) {
    std::string line = "session " + to_hex(c->sid());
    switch (c->state()) {
      case discovery::ClientState::kComplete:
        line += " complete peer=" + c->service().server_name.str() + " atk=" + short_hex(*c->atk());
        if (c->reply()) line += " reply=" + to_hex(*c->reply());
        break;
      case discovery::ClientState::kAborted:
        line += std::string(" aborted reason=") + discovery::client_abort_name(c->abort_reason());
        break;
      default: line += " pending"; break;
    }
    out.push_back(line);
  }
  return out;
}

std::optional<Bytes> DiscoveryClientParty::reveal_session_state(const SessionId& sid) const {
  for (const auto& c : conns_) {
    if (c->sid() != sid) continue;
    auto x = c->reveal_ephemeral();
    if (!x) return std::nullopt;
    return Bytes(x->bytes().begin(), x->bytes().end());
  }
  return std::nullopt;
}

std::optional<Key32> DiscoveryClientParty::reveal_key(const SessionId& sid) const {
  for (const auto& c : conns_)
    if (c->sid() == sid) return c->atk();
  return std::nullopt;
}

std::optional<Corruption> DiscoveryClientParty::corrupt() const { return corruption_of(*cfg_.principal); }

}  // namespace privdisc::simnet

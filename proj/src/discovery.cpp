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


#include "privdisc/discovery.hpp"

#include <cstring>

namespace privdisc::discovery {

namespace {

Bytes flight_ad(wire::FrameType type, const BroadcastId& bid, const SessionId& sid) {
  Bytes ad{static_cast<std::uint8_t>(type)};
  append(ad, bid);
  append(ad, sid);
  return ad;
}

Bytes client_signed_message(const BroadcastId& bid, const SessionId& sid, const Key32& server_digest,
                            ByteView client_blessing, const dh::Element& gs, const dh::Element& gx) {
  Bytes m(bid.begin(), bid.end());
  append(m, sid);
  append(m, server_digest);
  append_prefixed(m, client_blessing);
  append(m, gs.view());
  append(m, gx.view());
  return m;
}

Bytes echo_tuple(const BroadcastId& bid, const SessionId& sid, const Key32& server_digest,
                 const Key32& client_digest, const dh::Element& gs, const dh::Element& gx,
                 const dh::Element& gy) {
  Bytes m(bid.begin(), bid.end());
  append(m, sid);
  append(m, server_digest);
  append(m, client_digest);
  append(m, gs.view());
  append(m, gx.view());
  append(m, gy.view());
  return m;
}

const auto kC1Nonce = aead::make_nonce(direction::kClientToServer, 0);
const auto kC2Nonce = aead::make_nonce(direction::kEarlyData, 0);
const auto kC1pNonce = aead::make_nonce(direction::kServerToClient, 0);
const auto kC2pNonce = aead::make_nonce(direction::kApplication, 0);

}  // namespace

DiscoveryKeys key_schedule_0rtt(const dh::Element& gs, const dh::Element& gx, const dh::Element& gsx) {
  const Key32 k = tagged_hash(HashDomain::kDiscoverySemiStatic, {gs.view(), gx.view(), gsx.view()});
  Bytes stream = prg_expand(k, 4 * 32);
  DiscoveryKeys out;
  std::memcpy(out.htk.data(), stream.data(), 32);
  std::memcpy(out.htk2.data(), stream.data() + 32, 32);
  std::memcpy(out.exk.data(), stream.data() + 64, 32);
  std::memcpy(out.eadk.data(), stream.data() + 96, 32);
  secure_wipe(stream);
  return out;
}

Key32 derive_atk(const Key32& exk, const dh::Element& gx, const dh::Element& gy, const dh::Element& gxy) {
  return hkdf_extract(exk, tagged_hash(HashDomain::kDiscoveryEphemeral, {gx.view(), gy.view(), gxy.view()}));
}

Bytes broadcast_signed_message(const BroadcastId& bid, ByteView blessing_body, const dh::Element& gs,
                               std::uint64_t expiry) {
  Bytes m(bid.begin(), bid.end());
  append_prefixed(m, blessing_body);
  append(m, gs.view());
  append_u64(m, expiry);
  return m;
}

Bytes advert_payload(ByteView blessing_body, const dh::Element& gs, std::uint64_t expiry, const Signature& sig) {
  wire::TlvWriter w;
  w.put(1, blessing_body).put(2, gs.view()).put_u64(3, expiry).put(4, sig);
  return w.take();
}

// ---- replay cache ----

std::size_t ReplayCache::Hash::operator()(const SessionId& s) const noexcept {
  std::size_t h;
  std::memcpy(&h, s.data(), sizeof h);
  return h;
}

bool ReplayCache::contains(const SessionId& sid) const {
  std::lock_guard lock(mu_);
  return seen_.count(sid) != 0;
}

InsertResult ReplayCache::insert(const SessionId& sid) {
  std::lock_guard lock(mu_);
  if (seen_.count(sid)) return InsertResult::kDuplicate;
  if (seen_.size() >= capacity_) return InsertResult::kFull;
  seen_.insert(sid);
  return InsertResult::kInserted;
}

std::size_t ReplayCache::size() const {
  std::lock_guard lock(mu_);
  return seen_.size();
}

// ---- server ----

const char* accept_status_name(AcceptStatus s) noexcept {
  switch (s) {
    case AcceptStatus::kAccepted: return "accepted";
    case AcceptStatus::kUnknownBroadcast: return "unknown-broadcast";
    case AcceptStatus::kExpired: return "expired";
    case AcceptStatus::kReplay: return "replay";
    case AcceptStatus::kCacheFull: return "cache-full";
    case AcceptStatus::kAeadFailure: return "aead-failure";
    case AcceptStatus::kMalformed: return "malformed";
    case AcceptStatus::kIdentityMismatch: return "identity-mismatch";
    case AcceptStatus::kBadChain: return "bad-chain";
    case AcceptStatus::kPolicy: return "policy";
    case AcceptStatus::kBadSignature: return "bad-signature";
    case AcceptStatus::kEarlyDataFailure: return "early-data-failure";
  }
  return "unknown";
}

BroadcastServer::BroadcastServer(ServerConfig cfg, std::uint64_t initial_counter)
    : cfg_(std::move(cfg)), counter_(initial_counter) {
  if (!cfg_.principal) throw Error(Errc::kMalformed, "server needs a principal");
}

Broadcast BroadcastServer::make_broadcast(const PrefixPolicy& policy, std::uint64_t ttl_seconds,
                                          std::uint64_t now, Entropy& entropy) {
  const Principal& me = *cfg_.principal;
  if (!me.keyring()) throw Error(Errc::kMalformed, "server needs a keyring for the IBE root key");
  if (ttl_seconds == 0 || now > UINT64_MAX - ttl_seconds) throw Error(Errc::kMalformed, "bad TTL");

  std::unique_lock lock(mu_);
  if (counter_ == UINT64_MAX) throw Error(Errc::kCounterOverflow, "broadcast counter exhausted");
  if (state_) state_->s.wipe();
  state_.reset();
  ++counter_;

  auto st = std::make_unique<SemiStaticState>(SemiStaticState{
      dh::Exponent::random(entropy), {}, {}, now + ttl_seconds, policy, wire::encode_body(me.blessing()),
      blessing_digest(me.blessing()), std::make_unique<ReplayCache>(cfg_.cache_capacity)});
  st->gs = st->s.public_element();
  for (int i = 0; i < 8; ++i) st->bid[i] = static_cast<std::uint8_t>(counter_ >> (56 - 8 * i));
  auto rnd = entropy.draw<8>();
  std::copy(rnd.begin(), rnd.end(), st->bid.begin() + 8);

  auto sig = sign(me.keypair, label::kBroadcast,
                  broadcast_signed_message(st->bid, st->blessing_body, st->gs, st->expiry));
  Broadcast b{st->bid, st->expiry,
              prefix::pe_enc(me.keyring()->mpk, policy, advert_payload(st->blessing_body, st->gs, st->expiry, sig),
                             entropy)};
  state_ = std::move(st);
  return b;
}

AcceptResult BroadcastServer::accept(const F1& f1, std::uint64_t now, Entropy& entropy,
                                     std::optional<ByteView> reply) {
  std::shared_lock lock(mu_);
  AcceptResult res;
  auto fail = [&](AcceptStatus s) {
    res.status = s;
    return res;
  };
  if (!state_ || state_->bid != f1.bid) return fail(AcceptStatus::kUnknownBroadcast);
  const SemiStaticState& st = *state_;
  if (now >= st.expiry) return fail(AcceptStatus::kExpired);
  if (st.cache->contains(f1.sid)) return fail(AcceptStatus::kReplay);

  auto gsx = st.s.shared(f1.gx);
  if (!gsx) return fail(AcceptStatus::kMalformed);
  const DiscoveryKeys keys = key_schedule_0rtt(st.gs, f1.gx, *gsx);
  const Bytes ad1 = flight_ad(wire::FrameType::kF1, f1.bid, f1.sid);

  auto pt = aead::open(keys.htk, kC1Nonce, f1.c1, ad1);
  if (!pt) return fail(AcceptStatus::kAeadFailure);
  Key32 server_digest;
  Bytes client_blessing_body;
  Signature sig_c;
  try {
    wire::TlvReader r(*pt);
    server_digest = r.fixed<32>(1);
    auto b = r.one(2);
    client_blessing_body.assign(b.begin(), b.end());
    sig_c = r.fixed<ecdsa::kSignatureSize>(3);
    r.finish();
  } catch (const Error&) {
    return fail(AcceptStatus::kMalformed);
  }
  if (!constant_time_equal(server_digest, st.blessing_digest)) return fail(AcceptStatus::kIdentityMismatch);

  std::optional<Blessing> client_blessing;
  try {
    client_blessing = wire::decode_body<Blessing>(client_blessing_body);
  } catch (const Error&) {
    return fail(AcceptStatus::kMalformed);
  }
  auto chain = validate_chain(*client_blessing, cfg_.anchors);
  if (!chain.ok()) return fail(AcceptStatus::kBadChain);
  if (!satisfies(*chain.name, st.policy)) return fail(AcceptStatus::kPolicy);
  if (!verify(client_blessing->public_key(), label::kConnect,
              client_signed_message(f1.bid, f1.sid, server_digest, client_blessing_body, st.gs, f1.gx), sig_c))
    return fail(AcceptStatus::kBadSignature);

  if (f1.c2) {
    auto ed = aead::open(keys.eadk, kC2Nonce, *f1.c2, ad1);
    if (!ed) return fail(AcceptStatus::kEarlyDataFailure);
    res.early_data = std::move(*ed);
  }

  switch (st.cache->insert(f1.sid)) {
    case InsertResult::kInserted: break;
    case InsertResult::kDuplicate: return fail(AcceptStatus::kReplay);
    case InsertResult::kFull: return fail(AcceptStatus::kCacheFull);
  }

  dh::Exponent y = dh::Exponent::random(entropy);
  const dh::Element gy = y.public_element();
  auto gxy = y.shared(f1.gx);
  if (!gxy) return fail(AcceptStatus::kMalformed);
  res.atk = derive_atk(keys.exk, f1.gx, gy, *gxy);
  y.wipe();

  const Bytes ad2 = flight_ad(wire::FrameType::kF2, f1.bid, f1.sid);
  F2 f2{f1.bid, f1.sid, gy, std::nullopt,
        aead::seal(keys.htk2, kC1pNonce,
                   echo_tuple(f1.bid, f1.sid, server_digest, blessing_digest(*client_blessing), st.gs, f1.gx, gy),
                   ad2)};
  if (reply) f2.c2 = aead::seal(res.atk, kC2pNonce, *reply, ad2);
  res.f2 = std::move(f2);
  res.client_name = chain.name;
  res.status = AcceptStatus::kAccepted;
  return res;
}

std::optional<dh::Exponent> BroadcastServer::reveal_semi_static(const BroadcastId& bid) const {
  std::shared_lock lock(mu_);
  if (!state_ || state_->bid != bid) return std::nullopt;
  return state_->s;
}

std::optional<BroadcastId> BroadcastServer::current_bid() const {
  std::shared_lock lock(mu_);
  if (!state_) return std::nullopt;
  return state_->bid;
}

std::uint64_t BroadcastServer::counter() const {
  std::shared_lock lock(mu_);
  return counter_;
}

std::size_t BroadcastServer::cache_size() const {
  std::shared_lock lock(mu_);
  return state_ ? state_->cache->size() : 0;
}

// ---- client ----

const char* discover_status_name(DiscoverStatus s) noexcept {
  switch (s) {
    case DiscoverStatus::kOk: return "ok";
    case DiscoverStatus::kNotAuthorized: return "not-authorized";
    case DiscoverStatus::kExpired: return "expired";
    case DiscoverStatus::kBadSignature: return "bad-signature";
    case DiscoverStatus::kBadChain: return "bad-chain";
    case DiscoverStatus::kPolicy: return "policy";
    case DiscoverStatus::kMalformed: return "malformed";
  }
  return "unknown";
}

DiscoverResult process_broadcast(const ClientConfig& cfg, ByteView broadcast_bytes, std::uint64_t now) {
  std::optional<Broadcast> b;
  try {
    b = wire::decode<Broadcast>(broadcast_bytes);
  } catch (const Error&) {
    return {DiscoverStatus::kMalformed, std::nullopt};
  }
  return process_broadcast(cfg, *b, now);
}

DiscoverResult process_broadcast(const ClientConfig& cfg, const Broadcast& b, std::uint64_t now) {
  auto fail = [](DiscoverStatus s) { return DiscoverResult{s, std::nullopt}; };
  if (now >= b.expiry_hint) return fail(DiscoverStatus::kExpired);
  const Principal& me = *cfg.principal;
  if (!satisfies(me.name(), b.adv_ct.policy) || !me.keyring()) return fail(DiscoverStatus::kNotAuthorized);
  auto dec = prefix::pe_dec(*me.keyring(), b.adv_ct);
  if (!dec.ok()) return fail(DiscoverStatus::kMalformed);

  Bytes blessing_body;
  std::optional<dh::Element> gs;
  std::uint64_t expiry = 0;
  Signature sig{};
  try {
    wire::TlvReader r(dec.payload);
    auto bb = r.one(1);
    blessing_body.assign(bb.begin(), bb.end());
    gs = dh::Element::from_bytes(r.one(2));
    expiry = r.u64(3);
    sig = r.fixed<ecdsa::kSignatureSize>(4);
    r.finish();
  } catch (const Error&) {
    return fail(DiscoverStatus::kMalformed);
  }
  if (!gs) return fail(DiscoverStatus::kMalformed);
  // The signed expiry is authoritative; a cleartext hint that disagrees
  // means the broadcast was altered.
  if (expiry != b.expiry_hint) return fail(DiscoverStatus::kBadSignature);

  std::optional<Blessing> blessing;
  try {
    blessing = wire::decode_body<Blessing>(blessing_body);
  } catch (const Error&) {
    return fail(DiscoverStatus::kMalformed);
  }
  auto chain = validate_chain(*blessing, cfg.anchors);
  if (!chain.ok()) return fail(DiscoverStatus::kBadChain);
  if (!satisfies(*chain.name, cfg.policy)) return fail(DiscoverStatus::kPolicy);
  if (!verify(blessing->public_key(), label::kBroadcast, broadcast_signed_message(b.bid, blessing_body, *gs, expiry),
              sig))
    return fail(DiscoverStatus::kBadSignature);
  if (now >= expiry) return fail(DiscoverStatus::kExpired);

  return {DiscoverStatus::kOk,
          DiscoveredService{*chain.name, *blessing, blessing_digest(*blessing), *gs, b.bid, expiry}};
}

const char* client_abort_name(ClientAbort a) noexcept {
  switch (a) {
    case ClientAbort::kNone: return "none";
    case ClientAbort::kBadState: return "bad-state";
    case ClientAbort::kExpired: return "expired";
    case ClientAbort::kMismatch: return "mismatch";
    case ClientAbort::kAeadFailure: return "aead-failure";
    case ClientAbort::kMalformed: return "malformed";
    case ClientAbort::kTimeout: return "timeout";
  }
  return "unknown";
}

ClientConnection::ClientConnection(ClientConfig cfg, DiscoveredService svc)
    : cfg_(std::move(cfg)), svc_(std::move(svc)) {
  if (!cfg_.principal) throw Error(Errc::kMalformed, "client needs a principal");
}

void ClientConnection::erase() {
  if (x_) x_->wipe();
  x_.reset();
}

void ClientConnection::abort(ClientAbort reason) {
  if (state_ == ClientState::kComplete || state_ == ClientState::kAborted) return;
  state_ = ClientState::kAborted;
  reason_ = reason;
  erase();
}

std::optional<F1> ClientConnection::connect(std::optional<ByteView> early_data, std::uint64_t now,
                                            Entropy& entropy) {
  if (state_ != ClientState::kInit) {
    abort(ClientAbort::kBadState);
    return std::nullopt;
  }
  if (now >= svc_.expiry) {
    abort(ClientAbort::kExpired);
    return std::nullopt;
  }
  const Principal& me = *cfg_.principal;
  sid_ = entropy.draw<kSessionIdSize>();
  x_ = dh::Exponent::random(entropy);
  gx_ = x_->public_element();
  auto gsx = x_->shared(svc_.gs);
  if (!gsx) {
    abort(ClientAbort::kMalformed);
    return std::nullopt;
  }
  keys_ = key_schedule_0rtt(svc_.gs, *gx_, *gsx);
  client_digest_ = blessing_digest(me.blessing());

  const Bytes blessing_body = wire::encode_body(me.blessing());
  auto sig = sign(me.keypair, label::kConnect,
                  client_signed_message(svc_.bid, sid_, svc_.server_digest, blessing_body, svc_.gs, *gx_));
  wire::TlvWriter w;
  w.put(1, svc_.server_digest).put(2, blessing_body).put(3, sig);
  const Bytes ad = flight_ad(wire::FrameType::kF1, svc_.bid, sid_);
  F1 f1{svc_.bid, sid_, *gx_, std::nullopt, aead::seal(keys_->htk, kC1Nonce, w.bytes(), ad)};
  if (early_data) f1.c2 = aead::seal(keys_->eadk, kC2Nonce, *early_data, ad);
  state_ = ClientState::kAwaitResponse;
  return f1;
}

bool ClientConnection::on_response(const F2& f2) {
  if (state_ != ClientState::kAwaitResponse) {
    abort(ClientAbort::kBadState);
    return false;
  }
  if (f2.bid != svc_.bid || f2.sid != sid_) {
    abort(ClientAbort::kMismatch);
    return false;
  }
  const Bytes ad = flight_ad(wire::FrameType::kF2, f2.bid, f2.sid);
  auto echo = aead::open(keys_->htk2, kC1pNonce, f2.c1, ad);
  if (!echo) {
    abort(ClientAbort::kAeadFailure);
    return false;
  }
  const Bytes expected = echo_tuple(svc_.bid, sid_, svc_.server_digest, client_digest_, svc_.gs, *gx_, f2.gy);
  if (!constant_time_equal(*echo, expected)) {
    abort(ClientAbort::kMismatch);
    return false;
  }
  auto gxy = x_->shared(f2.gy);
  if (!gxy) {
    abort(ClientAbort::kMalformed);
    return false;
  }
  const Key32 atk = derive_atk(keys_->exk, *gx_, f2.gy, *gxy);
  if (f2.c2) {
    auto data = aead::open(atk, kC2pNonce, *f2.c2, ad);
    if (!data) {
      abort(ClientAbort::kAeadFailure);
      return false;
    }
    reply_ = std::move(*data);
  }
  atk_ = atk;
  state_ = ClientState::kComplete;
  erase();
  return true;
}

// ---- PFS window ----

PfsReport demonstrate_pfs_window(const F1& f1, const F2& f2, const dh::Exponent& revealed_s) {
  PfsReport rep;
  const dh::Element gs = revealed_s.public_element();
  auto gsx = revealed_s.shared(f1.gx);
  if (!gsx) return rep;
  const DiscoveryKeys keys = key_schedule_0rtt(gs, f1.gx, *gsx);
  if (f1.c2) {
    if (auto ed = aead::open(keys.eadk, kC2Nonce, *f1.c2, flight_ad(wire::FrameType::kF1, f1.bid, f1.sid))) {
      rep.early_data_recovered = true;
      rep.early_data = std::move(*ed);
    }
  }
  if (f2.c2) {
    const Bytes ad2 = flight_ad(wire::FrameType::kF2, f2.bid, f2.sid);
    for (const Key32* k : {&keys.htk, &keys.htk2, &keys.exk, &keys.eadk}) {
      if (auto d = aead::open(*k, kC2pNonce, *f2.c2, ad2)) {
        rep.app_data_recovered = true;
        rep.app_data = std::move(*d);
        break;
      }
    }
  }
  return rep;
}

PfsReport demonstrate_pfs_window_client(const F1& f1, const F2& f2, const dh::Element& gs,
                                        const dh::Exponent& revealed_x) {
  PfsReport rep;
  auto gsx = revealed_x.shared(gs);
  auto gxy = revealed_x.shared(f2.gy);
  if (!gsx || !gxy) return rep;
  const DiscoveryKeys keys = key_schedule_0rtt(gs, f1.gx, *gsx);
  if (f1.c2) {
    if (auto ed = aead::open(keys.eadk, kC2Nonce, *f1.c2, flight_ad(wire::FrameType::kF1, f1.bid, f1.sid))) {
      rep.early_data_recovered = true;
      rep.early_data = std::move(*ed);
    }
  }
  if (f2.c2) {
    const Key32 atk = derive_atk(keys.exk, f1.gx, f2.gy, *gxy);
    if (auto d = aead::open(atk, kC2pNonce, *f2.c2, flight_ad(wire::FrameType::kF2, f2.bid, f2.sid))) {
      rep.app_data_recovered = true;
      rep.app_data = std::move(*d);
    }
  }
  return rep;
}

}  // namespace privdisc::discovery

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


#include "privdisc/mutual_auth.hpp"

namespace privdisc::mutual_auth {

namespace {

Bytes aead_ad(wire::FrameType type, const SessionId& sid) {
  Bytes ad{static_cast<std::uint8_t>(type)};
  append(ad, sid);
  return ad;
}

Bytes signed_transcript(AuthMode mode, const SessionId& sid, ByteView identity, const dh::Element& gx,
                        const dh::Element& gy) {
  Bytes m{static_cast<std::uint8_t>(mode)};
  append(m, sid);
  append_prefixed(m, identity);
  append(m, gx.view());
  append(m, gy.view());
  return m;
}

Bytes inner(ByteView identity, const Signature& sig) {
  wire::TlvWriter w;
  w.put(1, identity).put(2, sig);
  return w.take();
}

struct Inner {
  Bytes identity;
  Signature sig{};
};

std::optional<Inner> parse_inner(ByteView body) {
  try {
    wire::TlvReader r(body);
    auto id = r.one(1);
    Inner out{Bytes(id.begin(), id.end()), r.fixed<ecdsa::kSignatureSize>(2)};
    r.finish();
    return out;
  } catch (const Error&) {
    return std::nullopt;
  }
}

template <class T>
std::optional<T> try_decode(ByteView body) {
  try {
    return wire::decode_body<T>(body);
  } catch (const Error&) {
    return std::nullopt;
  }
}

SessionId random_sid(Entropy& entropy) { return entropy.draw<kSessionIdSize>(); }

}  // namespace

HandshakeKeys kdf_sigma(const dh::Element& gx, const dh::Element& gy, const dh::Element& gxy) {
  return {tagged_hash(HashDomain::kSigmaHandshake, {gx.view(), gy.view(), gxy.view()}),
          tagged_hash(HashDomain::kSigmaApplication, {gx.view(), gy.view(), gxy.view()})};
}

const char* state_name(State s) noexcept {
  switch (s) {
    case State::kInit: return "init";
    case State::kAwaitResponse: return "await-response";
    case State::kAwaitFinish: return "await-finish";
    case State::kComplete: return "complete";
    case State::kAborted: return "aborted";
  }
  return "unknown";
}

const char* abort_reason_name(AbortReason r) noexcept {
  switch (r) {
    case AbortReason::kNone: return "none";
    case AbortReason::kBadState: return "bad-state";
    case AbortReason::kSessionMismatch: return "session-mismatch";
    case AbortReason::kModeMismatch: return "mode-mismatch";
    case AbortReason::kMalformed: return "malformed";
    case AbortReason::kAeadFailure: return "aead-failure";
    case AbortReason::kNotAuthorized: return "not-authorized";
    case AbortReason::kDecryptionFailed: return "decryption-failed";
    case AbortReason::kBadChain: return "bad-chain";
    case AbortReason::kPolicy: return "policy";
    case AbortReason::kBadSignature: return "bad-signature";
    case AbortReason::kTimeout: return "timeout";
  }
  return "unknown";
}

std::shared_ptr<const CachedServerIdentity> make_cached_identity(const Principal& server,
                                                                 Entropy& entropy) {
  if (!server.policy || !server.keyring()) throw Error(Errc::kMalformed, "server needs a policy and keyring");
  auto ct = prefix::pe_enc(server.keyring()->mpk, *server.policy, wire::encode_body(server.blessing()), entropy);
  auto body = wire::encode_body(ct);
  return std::make_shared<const CachedServerIdentity>(CachedServerIdentity{std::move(ct), std::move(body)});
}

// ---- client ----

ClientSession::ClientSession(Config cfg) : cfg_(std::move(cfg)) {
  if (!cfg_.principal) throw Error(Errc::kMalformed, "session needs a principal");
}

M1 ClientSession::start(Entropy& entropy) {
  if (state_ != State::kInit) throw Error(Errc::kMalformed, "session already started");
  sid_ = random_sid(entropy);
  x_ = dh::Exponent::random(entropy);
  gx_ = x_->public_element();
  state_ = State::kAwaitResponse;
  return M1{sid_, *gx_};
}

std::optional<M3> ClientSession::fail(AbortReason reason) {
  abort(reason);
  return std::nullopt;
}

void ClientSession::abort(AbortReason reason) {
  if (state_ == State::kComplete || state_ == State::kAborted) return;
  state_ = State::kAborted;
  reason_ = reason;
  erase();
}

void ClientSession::erase() {
  if (x_) x_->wipe();
  x_.reset();
}

std::optional<dh::Exponent> ClientSession::reveal_ephemeral() const { return x_; }

std::optional<M3> ClientSession::on_response(const M2& m2) {
  if (state_ != State::kAwaitResponse) return fail(AbortReason::kBadState);
  if (m2.sid != sid_) return fail(AbortReason::kSessionMismatch);
  if (m2.mode != cfg_.mode) return fail(AbortReason::kModeMismatch);
  const Principal& me = *cfg_.principal;

  auto gxy = x_->shared(m2.gy);
  if (!gxy) return fail(AbortReason::kMalformed);
  keys_ = kdf_sigma(*gx_, m2.gy, *gxy);
  const auto nonce = aead::make_nonce(direction::kServerToClient, 0);
  const auto ad = aead_ad(wire::FrameType::kM2, sid_);

  // Identity bytes the server signed, and the blessing they carry.
  Bytes signed_identity;
  Bytes blessing_body;
  Signature sig_s{};
  const HierName my_name = me.name();

  if (m2.mode == AuthMode::kUnlinkable) {
    if (!m2.wrapped) return fail(AbortReason::kMalformed);
    if (!satisfies(my_name, m2.wrapped->policy)) return fail(AbortReason::kNotAuthorized);
    if (!me.keyring()) return fail(AbortReason::kDecryptionFailed);
    auto sealed = prefix::pe_dec(*me.keyring(), *m2.wrapped);
    if (!sealed.ok()) return fail(AbortReason::kDecryptionFailed);
    auto pt = aead::open(keys_->htk, nonce, sealed.payload, ad);
    if (!pt) return fail(AbortReason::kAeadFailure);
    auto in = parse_inner(*pt);
    if (!in) return fail(AbortReason::kMalformed);
    signed_identity = in->identity;
    blessing_body = std::move(in->identity);
    sig_s = in->sig;
  } else {
    auto pt = aead::open(keys_->htk, nonce, m2.sealed, ad);
    if (!pt) return fail(AbortReason::kAeadFailure);
    auto in = parse_inner(*pt);
    if (!in) return fail(AbortReason::kMalformed);
    sig_s = in->sig;
    signed_identity = in->identity;
    if (m2.mode == AuthMode::kCacheable) {
      auto ct_s = try_decode<prefix::PrefixCiphertext>(in->identity);
      if (!ct_s) return fail(AbortReason::kMalformed);
      // The policy is public: check it before attempting any decryption.
      if (!satisfies(my_name, ct_s->policy)) return fail(AbortReason::kNotAuthorized);
      if (!me.keyring()) return fail(AbortReason::kDecryptionFailed);
      auto dec = prefix::pe_dec(*me.keyring(), *ct_s);
      if (!dec.ok()) return fail(AbortReason::kDecryptionFailed);
      blessing_body = std::move(dec.payload);
    } else {
      blessing_body = std::move(in->identity);
    }
  }

  auto blessing = try_decode<Blessing>(blessing_body);
  if (!blessing) return fail(AbortReason::kMalformed);
  auto chain = validate_chain(*blessing, cfg_.anchors);
  if (!chain.ok()) return fail(AbortReason::kBadChain);
  if (!satisfies(*chain.name, cfg_.policy)) return fail(AbortReason::kPolicy);
  if (!verify(blessing->public_key(), label::kResponse,
              signed_transcript(m2.mode, sid_, signed_identity, *gx_, m2.gy), sig_s))
    return fail(AbortReason::kBadSignature);

  const Bytes my_blessing = wire::encode_body(me.blessing());
  const auto sig_c =
      sign(me.keypair, label::kFinish, signed_transcript(m2.mode, sid_, my_blessing, *gx_, m2.gy));
  M3 m3{sid_, aead::seal(keys_->htk, aead::make_nonce(direction::kClientToServer, 0), inner(my_blessing, sig_c),
                         aead_ad(wire::FrameType::kM3, sid_))};
  output_ = SessionOutput{sid_, *chain.name, std::move(*blessing), *keys_};
  state_ = State::kComplete;
  erase();
  return m3;
}

// ---- server ----

ServerSession::ServerSession(Config cfg, std::shared_ptr<const CachedServerIdentity> cached)
    : cfg_(std::move(cfg)), cached_(std::move(cached)) {
  if (!cfg_.principal) throw Error(Errc::kMalformed, "session needs a principal");
}

bool ServerSession::fail(AbortReason reason) {
  abort(reason);
  return false;
}

void ServerSession::abort(AbortReason reason) {
  if (state_ == State::kComplete || state_ == State::kAborted) return;
  state_ = State::kAborted;
  reason_ = reason;
  erase();
}

void ServerSession::erase() {
  if (y_) y_->wipe();
  y_.reset();
}

std::optional<dh::Exponent> ServerSession::reveal_ephemeral() const { return y_; }

std::optional<M2> ServerSession::on_init(const M1& m1, Entropy& entropy) {
  if (state_ != State::kInit) {
    abort(AbortReason::kBadState);
    return std::nullopt;
  }
  const Principal& me = *cfg_.principal;
  sid_ = m1.sid;
  y_ = dh::Exponent::random(entropy);
  gx_ = m1.gx;
  gy_ = y_->public_element();
  auto gxy = y_->shared(m1.gx);
  if (!gxy) {
    abort(AbortReason::kMalformed);
    return std::nullopt;
  }
  keys_ = kdf_sigma(*gx_, *gy_, *gxy);
  const auto nonce = aead::make_nonce(direction::kServerToClient, 0);
  const auto ad = aead_ad(wire::FrameType::kM2, sid_);

  M2 m2{sid_, *gy_, cfg_.mode, {}, std::nullopt};
  switch (cfg_.mode) {
    case AuthMode::kCacheable: {
      if (!cached_) cached_ = make_cached_identity(me, entropy);
      auto sig = sign(me.keypair, label::kResponse,
                      signed_transcript(cfg_.mode, sid_, cached_->ct_s_body, *gx_, *gy_));
      m2.sealed = aead::seal(keys_->htk, nonce, inner(cached_->ct_s_body, sig), ad);
      break;
    }
    case AuthMode::kUnlinkable: {
      if (!me.policy || !me.keyring()) throw Error(Errc::kMalformed, "server needs a policy and keyring");
      const Bytes blessing = wire::encode_body(me.blessing());
      auto sig = sign(me.keypair, label::kResponse, signed_transcript(cfg_.mode, sid_, blessing, *gx_, *gy_));
      auto sealed = aead::seal(keys_->htk, nonce, inner(blessing, sig), ad);
      m2.wrapped = prefix::pe_enc(me.keyring()->mpk, *me.policy, sealed, entropy);
      break;
    }
    case AuthMode::kSigmaBaseline: {
      const Bytes blessing = wire::encode_body(me.blessing());
      auto sig = sign(me.keypair, label::kResponse, signed_transcript(cfg_.mode, sid_, blessing, *gx_, *gy_));
      m2.sealed = aead::seal(keys_->htk, nonce, inner(blessing, sig), ad);
      break;
    }
  }
  state_ = State::kAwaitFinish;
  return m2;
}

bool ServerSession::on_finish(const M3& m3) {
  if (state_ != State::kAwaitFinish) return fail(AbortReason::kBadState);
  if (m3.sid != sid_) return fail(AbortReason::kSessionMismatch);
  auto pt = aead::open(keys_->htk, aead::make_nonce(direction::kClientToServer, 0), m3.sealed,
                       aead_ad(wire::FrameType::kM3, sid_));
  if (!pt) return fail(AbortReason::kAeadFailure);
  auto in = parse_inner(*pt);
  if (!in) return fail(AbortReason::kMalformed);
  auto blessing = try_decode<Blessing>(in->identity);
  if (!blessing) return fail(AbortReason::kMalformed);
  auto chain = validate_chain(*blessing, cfg_.anchors);
  if (!chain.ok()) return fail(AbortReason::kBadChain);
  if (!satisfies(*chain.name, cfg_.policy)) return fail(AbortReason::kPolicy);
  if (!verify(blessing->public_key(), label::kFinish,
              signed_transcript(cfg_.mode, sid_, in->identity, *gx_, *gy_), in->sig))
    return fail(AbortReason::kBadSignature);
  output_ = SessionOutput{sid_, *chain.name, std::move(*blessing), *keys_};
  state_ = State::kComplete;
  erase();
  return true;
}

// ---- application records ----

AppData seal_app(const Key32& atk, const SessionId& sid, bool from_client, std::uint64_t seq,
                 ByteView plaintext) {
  const auto dir = from_client ? direction::kClientToServer : direction::kServerToClient;
  return AppData{sid, seq, aead::seal(atk, aead::make_nonce(dir, seq), plaintext,
                                      aead_ad(wire::FrameType::kAppData, sid))};
}

std::optional<Bytes> open_app(const Key32& atk, bool from_client, const AppData& record) {
  const auto dir = from_client ? direction::kClientToServer : direction::kServerToClient;
  return aead::open(atk, aead::make_nonce(dir, record.seq), record.sealed,
                    aead_ad(wire::FrameType::kAppData, record.sid));
}

}  // namespace privdisc::mutual_auth

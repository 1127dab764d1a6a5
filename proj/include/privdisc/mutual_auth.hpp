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

// Private mutual authentication: a SIGMA-I exchange in which the server's
// blessing travels prefix-encrypted under its policy, so only clients that
// satisfy the policy learn who the server is, and the client reveals its
// own blessing only after authenticating the server.
//
//   C -> S  M1: sid, g^x
//   S -> C  M2: sid, g^y, {ct_S, sig_S(sid, ct_S, g^x, g^y)}_htk          (cacheable)
//               sid, g^y, PE.Enc(pi_S, {id_S, sig_S(sid, id_S, g^x, g^y)}_htk)  (unlinkable)
//   C -> S  M3: sid, {id_C, sig_C(sid, id_C, g^x, g^y)}_htk
//
// (htk, atk) = (H(0x10 || g^x || g^y || g^xy), H(0x11 || g^x || g^y || g^xy)).

#include <memory>
#include <optional>

#include "privdisc/dh.hpp"
#include "privdisc/principals.hpp"
#include "privdisc/wire.hpp"

namespace privdisc::mutual_auth {

struct HandshakeKeys {
  Key32 htk{};
  Key32 atk{};
  bool operator==(const HandshakeKeys&) const = default;
};

HandshakeKeys kdf_sigma(const dh::Element& gx, const dh::Element& gy, const dh::Element& gxy);

enum class State { kInit, kAwaitResponse, kAwaitFinish, kComplete, kAborted };
const char* state_name(State s) noexcept;

enum class AbortReason {
  kNone,
  kBadState,
  kSessionMismatch,
  kModeMismatch,
  kMalformed,
  kAeadFailure,
  kNotAuthorized,      // own name outside the peer's policy
  kDecryptionFailed,   // prefix decryption failed
  kBadChain,
  kPolicy,             // peer name outside the local policy
  kBadSignature,
  kTimeout,
};
const char* abort_reason_name(AbortReason r) noexcept;

/// Static configuration shared by the sessions of one principal.
struct Config {
  std::shared_ptr<const Principal> principal;
  TrustAnchors anchors;
  /// Local policy applied to the peer's name.
  PrefixPolicy policy;
  AuthMode mode = AuthMode::kCacheable;
};

/// The server's prefix-encrypted blessing, reusable across cacheable sessions.
struct CachedServerIdentity {
  prefix::PrefixCiphertext ct_s;
  Bytes ct_s_body;  // canonical encoding, the bytes that get signed
};

/// Encrypts the principal's blessing under its own policy.
std::shared_ptr<const CachedServerIdentity> make_cached_identity(const Principal& server,
                                                                 Entropy& entropy);

struct SessionOutput {
  SessionId sid{};
  HierName peer;
  Blessing peer_blessing;
  HandshakeKeys keys;
};

class ClientSession {
 public:
  explicit ClientSession(Config cfg);

  M1 start(Entropy& entropy);
  /// Returns M3 on success; on any failure the session aborts silently.
  std::optional<M3> on_response(const M2& m2);
  void abort(AbortReason reason);

  State state() const { return state_; }
  AbortReason abort_reason() const { return reason_; }
  const SessionId& sid() const { return sid_; }
  const std::optional<SessionOutput>& output() const { return output_; }
  /// Ephemeral exponent while still held; nullopt once erased.
  std::optional<dh::Exponent> reveal_ephemeral() const;
  /// Handshake keys once derived.
  const std::optional<HandshakeKeys>& reveal_keys() const { return keys_; }

 private:
  std::optional<M3> fail(AbortReason reason);
  void erase();

  Config cfg_;
  State state_ = State::kInit;
  AbortReason reason_ = AbortReason::kNone;
  SessionId sid_{};
  std::optional<dh::Exponent> x_;
  std::optional<dh::Element> gx_;
  std::optional<HandshakeKeys> keys_;
  std::optional<SessionOutput> output_;
};

class ServerSession {
 public:
  /// `cached` is used in cacheable mode; without it a fresh ct_S is made.
  ServerSession(Config cfg, std::shared_ptr<const CachedServerIdentity> cached = nullptr);

  std::optional<M2> on_init(const M1& m1, Entropy& entropy);
  bool on_finish(const M3& m3);
  void abort(AbortReason reason);

  State state() const { return state_; }
  AbortReason abort_reason() const { return reason_; }
  const SessionId& sid() const { return sid_; }
  const std::optional<SessionOutput>& output() const { return output_; }
  std::optional<dh::Exponent> reveal_ephemeral() const;
  const std::optional<HandshakeKeys>& reveal_keys() const { return keys_; }

 private:
  bool fail(AbortReason reason);
  void erase();

  Config cfg_;
  std::shared_ptr<const CachedServerIdentity> cached_;
  State state_ = State::kInit;
  AbortReason reason_ = AbortReason::kNone;
  SessionId sid_{};
  std::optional<dh::Exponent> y_;
  std::optional<dh::Element> gx_, gy_;
  std::optional<HandshakeKeys> keys_;
  std::optional<SessionOutput> output_;
};

/// Application records under atk. Each direction keeps its own sequence.
AppData seal_app(const Key32& atk, const SessionId& sid, bool from_client, std::uint64_t seq,
                 ByteView plaintext);
std::optional<Bytes> open_app(const Key32& atk, bool from_client, const AppData& record);

}  // namespace privdisc::mutual_auth

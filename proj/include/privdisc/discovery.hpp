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

// Private service discovery with a 0-RTT handshake.
//
//   Broadcast: bid, PE.Enc(pi_S, (id_S, g^s, expiry, sig_S(bid, id_S, g^s, expiry)))
//   C -> S  F1: bid, sid, g^x, {digest(id_S), id_C, sig_C(bid, sid, id_S, id_C, g^s, g^x)}_htk,
//               {early data}_eadk
//   S -> C  F2: bid, sid, g^y, {bid, sid, id_S, id_C, g^s, g^x, g^y}_htk', {data}_atk
//
//   k = H1(g^s || g^x || g^sx); (htk, htk', exk, eadk) = PRG(k)
//   atk = Extract(exk, H2(g^x || g^y || g^xy))

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <unordered_set>

#include "privdisc/dh.hpp"
#include "privdisc/principals.hpp"
#include "privdisc/wire.hpp"

namespace privdisc::discovery {

constexpr std::uint64_t kDefaultTtl = 3600;
constexpr std::size_t kReplayCapacity = std::size_t{1} << 20;

struct DiscoveryKeys {
  Key32 htk{};
  Key32 htk2{};  // htk'
  Key32 exk{};
  Key32 eadk{};
  bool operator==(const DiscoveryKeys&) const = default;
};

DiscoveryKeys key_schedule_0rtt(const dh::Element& gs, const dh::Element& gx, const dh::Element& gsx);
Key32 derive_atk(const Key32& exk, const dh::Element& gx, const dh::Element& gy, const dh::Element& gxy);

/// Message covered by the broadcast signature.
Bytes broadcast_signed_message(const BroadcastId& bid, ByteView blessing_body, const dh::Element& gs,
                               std::uint64_t expiry);
/// Plaintext of adv_ct.
Bytes advert_payload(ByteView blessing_body, const dh::Element& gs, std::uint64_t expiry, const Signature& sig);

enum class InsertResult { kInserted, kDuplicate, kFull };

/// Session ids seen under one broadcast. Fails closed at capacity.
class ReplayCache {
 public:
  explicit ReplayCache(std::size_t capacity = kReplayCapacity) : capacity_(capacity) {}
  bool contains(const SessionId& sid) const;
  InsertResult insert(const SessionId& sid);
  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }

 private:
  struct Hash {
    std::size_t operator()(const SessionId& s) const noexcept;
  };
  mutable std::mutex mu_;
  std::unordered_set<SessionId, Hash> seen_;
  std::size_t capacity_;
};

struct SemiStaticState {
  dh::Exponent s;
  dh::Element gs;
  BroadcastId bid{};
  std::uint64_t expiry = 0;
  PrefixPolicy policy;
  Bytes blessing_body;
  Key32 blessing_digest{};
  std::unique_ptr<ReplayCache> cache;
};

enum class AcceptStatus {
  kAccepted,
  kUnknownBroadcast,
  kExpired,
  kReplay,
  kCacheFull,
  kAeadFailure,
  kMalformed,
  kIdentityMismatch,
  kBadChain,
  kPolicy,
  kBadSignature,
  kEarlyDataFailure,
};
const char* accept_status_name(AcceptStatus s) noexcept;

struct AcceptResult {
  AcceptStatus status = AcceptStatus::kMalformed;
  std::optional<F2> f2;
  Key32 atk{};
  std::optional<Bytes> early_data;
  std::optional<HierName> client_name;
  bool ok() const { return status == AcceptStatus::kAccepted; }
};

struct ServerConfig {
  std::shared_ptr<const Principal> principal;
  TrustAnchors anchors;
  std::size_t cache_capacity = kReplayCapacity;
};

/// Server side: owns the broadcast counter, the current semi-static state
/// and its replay cache. Acceptance may run concurrently; rotation waits for
/// in-flight acceptances and excludes new ones.
class BroadcastServer {
 public:
  explicit BroadcastServer(ServerConfig cfg, std::uint64_t initial_counter = 0);

  /// Erases the previous semi-static state. Throws Error(kCounterOverflow)
  /// when the counter is exhausted.
  Broadcast make_broadcast(const PrefixPolicy& policy, std::uint64_t ttl_seconds, std::uint64_t now,
                           Entropy& entropy);

  AcceptResult accept(const F1& f1, std::uint64_t now, Entropy& entropy,
                      std::optional<ByteView> reply = std::nullopt);

  /// BroadcastReveal: the semi-static exponent for `bid` if still held.
  std::optional<dh::Exponent> reveal_semi_static(const BroadcastId& bid) const;
  std::optional<BroadcastId> current_bid() const;
  std::uint64_t counter() const;
  std::size_t cache_size() const;

 private:
  ServerConfig cfg_;
  mutable std::shared_mutex mu_;
  std::uint64_t counter_;
  std::unique_ptr<SemiStaticState> state_;
};

enum class DiscoverStatus { kOk, kNotAuthorized, kExpired, kBadSignature, kBadChain, kPolicy, kMalformed };
const char* discover_status_name(DiscoverStatus s) noexcept;

struct DiscoveredService {
  HierName server_name;
  Blessing server_blessing;
  Key32 server_digest{};
  dh::Element gs;
  BroadcastId bid{};
  std::uint64_t expiry = 0;
};

struct DiscoverResult {
  DiscoverStatus status = DiscoverStatus::kMalformed;
  std::optional<DiscoveredService> service;
  bool ok() const { return status == DiscoverStatus::kOk; }
};

struct ClientConfig {
  std::shared_ptr<const Principal> principal;
  TrustAnchors anchors;
  /// Policy the server's name must satisfy (pi_C).
  PrefixPolicy policy;
};

DiscoverResult process_broadcast(const ClientConfig& cfg, ByteView broadcast_bytes, std::uint64_t now);
DiscoverResult process_broadcast(const ClientConfig& cfg, const Broadcast& b, std::uint64_t now);

enum class ClientState { kInit, kAwaitResponse, kComplete, kAborted };

enum class ClientAbort { kNone, kBadState, kExpired, kMismatch, kAeadFailure, kMalformed, kTimeout };
const char* client_abort_name(ClientAbort a) noexcept;

class ClientConnection {
 public:
  ClientConnection(ClientConfig cfg, DiscoveredService svc);

  /// nullopt (and kExpired) when the service has expired at `now`.
  std::optional<F1> connect(std::optional<ByteView> early_data, std::uint64_t now, Entropy& entropy);
  bool on_response(const F2& f2);
  void abort(ClientAbort reason);

  ClientState state() const { return state_; }
  ClientAbort abort_reason() const { return reason_; }
  const SessionId& sid() const { return sid_; }
  const DiscoveredService& service() const { return svc_; }
  /// Set on completion.
  const std::optional<Key32>& atk() const { return atk_; }
  const std::optional<Bytes>& reply() const { return reply_; }
  std::optional<dh::Exponent> reveal_ephemeral() const { return x_; }
  const std::optional<DiscoveryKeys>& reveal_keys() const { return keys_; }

 private:
  void erase();

  ClientConfig cfg_;
  DiscoveredService svc_;
  ClientState state_ = ClientState::kInit;
  ClientAbort reason_ = ClientAbort::kNone;
  SessionId sid_{};
  std::optional<dh::Exponent> x_;
  std::optional<dh::Element> gx_;
  std::optional<DiscoveryKeys> keys_;
  Key32 client_digest_{};
  std::optional<Key32> atk_;
  std::optional<Bytes> reply_;
};

struct PfsReport {
  bool early_data_recovered = false;
  Bytes early_data;
  bool app_data_recovered = false;
  Bytes app_data;
};

/// Given a completed exchange and the broadcast's revealed semi-static
/// exponent, tries to open c2 and c2' with every key derivable from
/// (transcript, s): early data opens, application data does not.
PfsReport demonstrate_pfs_window(const F1& f1, const F2& f2, const dh::Exponent& revealed_s);
/// Same with the client's revealed ephemeral exponent and the public g^s;
/// then atk is derivable and the application data opens too.
PfsReport demonstrate_pfs_window_client(const F1& f1, const F2& f2, const dh::Element& gs,
                                        const dh::Exponent& revealed_x);

}  // namespace privdisc::discovery

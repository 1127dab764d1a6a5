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

// In-process adversarial network. Parties exchange wire frames through a
// single FIFO queue that an adversary script controls; every transmission
// is logged to a transcript and copied to registered eavesdroppers.
//
// Script format, one action per line ('#' starts a comment):
//   deliver              deliver the queue head
//   drop                 discard the queue head
//   defer                move the queue head to the back
//   redirect <party>     change the queue head's destination
//   mutate <off> <xor>   xor one byte of the queue head (hex xor value)
//   replay <index>       re-send transcript entry <index> to its destination
//   inject <party> <hex> send adversary-chosen bytes to <party>
//   delay <seconds>      advance the virtual clock and tick every party
// After the last action the queue is drained in order, then the clock
// advances by the session timeout and every party is ticked.

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "privdisc/discovery.hpp"
#include "privdisc/mutual_auth.hpp"

namespace privdisc::simnet {

constexpr std::uint64_t kSessionTimeout = 30;
inline constexpr std::string_view kAdversary = "adversary";

struct Action {
  enum class Kind { kDeliver, kDrop, kDefer, kRedirect, kMutate, kReplay, kInject, kDelay };
  Kind kind = Kind::kDeliver;
  std::string party;
  std::size_t offset = 0;  // mutate offset, replay index
  std::uint8_t xor_mask = 0;
  std::uint64_t seconds = 0;
  Bytes bytes;
  bool operator==(const Action&) const = default;
};

using Script = std::vector<Action>;

/// Throws Error(kMalformed) with the offending line number.
Script parse_script(std::string_view text);
std::string script_to_text(const Script& script);

struct TranscriptEntry {
  std::size_t index = 0;
  std::uint64_t time = 0;
  std::string from;
  std::string to;
  /// Frame type name, "mutated", or "raw" for undecodable bytes.
  std::string kind;
  bool delivered = false;
  /// Sent by the adversary (mutated, redirected, replayed or injected).
  bool forged = false;
  Bytes bytes;
};

using Transcript = std::vector<TranscriptEntry>;

/// Overlapping occurrences of `needle` across all transcript frames.
std::size_t transcript_scan(const Transcript& t, ByteView needle);

struct Outbound {
  std::string to;
  Bytes bytes;
};

struct Context {
  std::uint64_t now = 0;
  Entropy& entropy;
};

/// What Corrupt reveals about a party.
struct Corruption {
  SigningKeyPair keypair;
  std::optional<prefix::PrefixKeyRing> keyring;
};

class Party {
 public:
  virtual ~Party() = default;
  virtual std::vector<Outbound> start(Context&) { return {}; }
  virtual std::vector<Outbound> on_frame(const std::string& from, ByteView bytes, Context& ctx) = 0;
  virtual void on_tick(std::uint64_t) {}
  /// One line per session, stable order.
  virtual std::vector<std::string> output() const = 0;

  // Compromise hooks. Implementations must not mutate protocol state.
  virtual std::optional<Bytes> reveal_session_state(const SessionId&) const { return std::nullopt; }
  virtual std::optional<Bytes> reveal_broadcast(const BroadcastId&) const { return std::nullopt; }
  virtual std::optional<Key32> reveal_key(const SessionId&) const { return std::nullopt; }
  virtual std::optional<Corruption> corrupt() const { return std::nullopt; }
};

struct PartyReport {
  std::string name;
  std::vector<std::string> lines;
};

struct ScenarioReport {
  Transcript transcript;
  std::vector<PartyReport> parties;
  std::map<std::string, Transcript> eavesdroppers;

  const PartyReport* party(std::string_view name) const;
  /// Line-oriented text form used by golden files.
  std::string to_text() const;
};

class Fabric;

/// Read-only adversary queries against the parties of a fabric.
class CompromiseHooks {
 public:
  explicit CompromiseHooks(const Fabric& f) : fabric_(f) {}
  std::optional<Bytes> reveal_session_state(const std::string& party, const SessionId& sid) const;
  std::optional<Bytes> reveal_broadcast(const std::string& party, const BroadcastId& bid) const;
  std::optional<Key32> reveal_key(const std::string& party, const SessionId& sid) const;
  std::optional<Corruption> corrupt(const std::string& party) const;

 private:
  const Fabric& fabric_;
};

class Fabric {
 public:
  explicit Fabric(std::uint64_t seed, std::uint64_t start_time = 0);

  void add_party(const std::string& name, std::shared_ptr<Party> party);
  void add_eavesdropper(const std::string& name);
  /// Called after every script step and drain step.
  void set_observer(std::function<void(const Fabric&)> observer) { observer_ = std::move(observer); }

  /// Starts every party in registration order, runs the script, drains.
  /// Throws Error(kMalformed) when the script names an unknown party.
  ScenarioReport run(const Script& script);

  std::uint64_t now() const { return now_; }
  const Transcript& transcript() const { return transcript_; }
  const Party* find(const std::string& name) const;
  CompromiseHooks hooks() const { return CompromiseHooks(*this); }

 private:
  std::size_t send(const std::string& from, const std::string& to, Bytes bytes, bool forged);
  void deliver_head();
  void tick_all();
  void require_party(const std::string& name) const;
  void notify() {
    if (observer_) observer_(*this);
  }

  SeededEntropy entropy_;
  std::uint64_t now_;
  std::vector<std::pair<std::string, std::shared_ptr<Party>>> parties_;
  std::vector<std::string> eavesdroppers_;
  std::map<std::string, Transcript> captures_;
  Transcript transcript_;
  std::deque<std::size_t> queue_;  // transcript indices
  std::function<void(const Fabric&)> observer_;
};

// ---- protocol parties ----

class MutualAuthClientParty final : public Party {
 public:
  MutualAuthClientParty(std::string server, mutual_auth::Config cfg, std::size_t sessions = 1);
  std::vector<Outbound> start(Context& ctx) override;
  std::vector<Outbound> on_frame(const std::string& from, ByteView bytes, Context& ctx) override;
  void on_tick(std::uint64_t now) override;
  std::vector<std::string> output() const override;
  std::optional<Bytes> reveal_session_state(const SessionId& sid) const override;
  std::optional<Key32> reveal_key(const SessionId& sid) const override;
  std::optional<Corruption> corrupt() const override;

  const std::vector<std::unique_ptr<mutual_auth::ClientSession>>& sessions() const { return sessions_; }

 private:
  const mutual_auth::ClientSession* find(const SessionId& sid) const;

  std::string server_;
  mutual_auth::Config cfg_;
  std::size_t count_;
  std::vector<std::unique_ptr<mutual_auth::ClientSession>> sessions_;
  std::uint64_t last_activity_ = 0;
};

class MutualAuthServerParty final : public Party {
 public:
  MutualAuthServerParty(mutual_auth::Config cfg,
                        std::shared_ptr<const mutual_auth::CachedServerIdentity> cached = nullptr);
  std::vector<Outbound> on_frame(const std::string& from, ByteView bytes, Context& ctx) override;
  void on_tick(std::uint64_t now) override;
  std::vector<std::string> output() const override;
  std::optional<Bytes> reveal_session_state(const SessionId& sid) const override;
  std::optional<Key32> reveal_key(const SessionId& sid) const override;
  std::optional<Corruption> corrupt() const override;

  const std::map<SessionId, std::unique_ptr<mutual_auth::ServerSession>>& sessions() const { return sessions_; }

 private:
  mutual_auth::Config cfg_;
  std::shared_ptr<const mutual_auth::CachedServerIdentity> cached_;
  std::map<SessionId, std::unique_ptr<mutual_auth::ServerSession>> sessions_;
  std::map<SessionId, std::uint64_t> started_;
};

class DiscoveryServerParty final : public Party {
 public:
  DiscoveryServerParty(discovery::ServerConfig cfg, PrefixPolicy policy, std::vector<std::string> audience,
                       std::uint64_t ttl = discovery::kDefaultTtl, std::optional<Bytes> reply = std::nullopt);
  std::vector<Outbound> start(Context& ctx) override;
  std::vector<Outbound> on_frame(const std::string& from, ByteView bytes, Context& ctx) override;
  std::vector<std::string> output() const override;
  std::optional<Bytes> reveal_broadcast(const BroadcastId& bid) const override;
  std::optional<Key32> reveal_key(const SessionId& sid) const override;
  std::optional<Corruption> corrupt() const override;

  const discovery::BroadcastServer& server() const { return server_; }

 private:
  std::shared_ptr<const Principal> principal_;
  discovery::BroadcastServer server_;
  PrefixPolicy policy_;
  std::vector<std::string> audience_;
  std::uint64_t ttl_;
  std::optional<Bytes> reply_;
  std::vector<std::string> log_;
  std::map<SessionId, Key32> keys_;
};

class DiscoveryClientParty final : public Party {
 public:
  DiscoveryClientParty(discovery::ClientConfig cfg, std::optional<Bytes> early_data = std::nullopt);
  std::vector<Outbound> on_frame(const std::string& from, ByteView bytes, Context& ctx) override;
  void on_tick(std::uint64_t now) override;
  std::vector<std::string> output() const override;
  std::optional<Bytes> reveal_session_state(const SessionId& sid) const override;
  std::optional<Key32> reveal_key(const SessionId& sid) const override;
  std::optional<Corruption> corrupt() const override;

  const std::vector<std::unique_ptr<discovery::ClientConnection>>& connections() const { return conns_; }
  const std::vector<std::string>& log() const { return log_; }

 private:
  discovery::ClientConfig cfg_;
  std::optional<Bytes> early_data_;
  std::vector<std::unique_ptr<discovery::ClientConnection>> conns_;
  std::vector<std::string> log_;
  std::uint64_t last_activity_ = 0;
};

// ---- AirDrop-style contact discovery ----

struct AirdropOptions {
  std::uint64_t seed = 1;
  /// When false the sender is not in the receiver's contacts.
  bool sender_is_contact = true;
  Bytes file = to_bytes("holiday-photo.jpg contents");
};

struct AirdropReport {
  ScenarioReport report;
  Bytes receiver_blessing;
  std::size_t eavesdropper_receiver_blessing_hits = 0;
  std::size_t receiver_frames_sent = 0;
  bool sender_complete = false;
  bool receiver_complete = false;
  bool file_delivered = false;
};

/// Truncated hash a sender advertises for its contact identifier.
std::array<std::uint8_t, kBeaconHashSize> contact_hash(const HierName& name);

/// Sender beacons a contact hash; a receiver that knows the sender replies,
/// then authenticates with its blessing prefix-encrypted to the sender's
/// name, and the file travels under atk. An eavesdropper watches it all.
AirdropReport airdrop_fix_scenario(const AirdropOptions& opts = {});

}  // namespace privdisc::simnet

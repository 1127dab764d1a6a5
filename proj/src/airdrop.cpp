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


#include <algorithm>

#include "privdisc/crypto.hpp"
#include "privdisc/simnet.hpp"

namespace privdisc::simnet {

std::array<std::uint8_t, kBeaconHashSize> contact_hash(const HierName& name) {
  const auto d = tagged_hash(HashDomain::kBeacon, {as_bytes(name.str())});
  std::array<std::uint8_t, kBeaconHashSize> out{};
  std::copy_n(d.begin(), out.size(), out.begin());
  return out;
}

namespace {

class AirdropSender : public Party {
 public:
  AirdropSender(std::string receiver, mutual_auth::Config cfg, Bytes file)
      : receiver_(std::move(receiver)), cfg_(std::move(cfg)), file_(std::move(file)) {}

  std::vector<Outbound> start(Context& ctx) override {
    ctx.entropy.fill(beacon_.nonce);
    beacon_.contact_hash = contact_hash(cfg_.principal->name());
    return {{receiver_, wire::encode(beacon_)}};
  }

  std::vector<Outbound> on_frame(const std::string& from, ByteView bytes, Context& ctx) override {
    try {
      switch (wire::peek_type(bytes)) {
        case wire::FrameType::kReady: {
          const auto ready = wire::decode<Ready>(bytes);
          if (ready.nonce != beacon_.nonce || session_) return {};
          session_ = std::make_unique<mutual_auth::ClientSession>(cfg_);
          return {{from, wire::encode(session_->start(ctx.entropy))}};
        }
        case wire::FrameType::kM2: {
          if (!session_) return {};
          auto m3 = session_->on_response(wire::decode<M2>(bytes));
          if (!m3) return {};
          std::vector<Outbound> out{{from, wire::encode(*m3)}};
          if (session_->output())
            out.push_back({from, wire::encode(mutual_auth::seal_app(session_->output()->keys.atk, session_->sid(),
                                                                    true, 0, file_))});
          return out;
        }
        default: return {};
      }
    } catch (const Error&) {
      return {};
    }
  }

  void on_tick(std::uint64_t) override {
    if (session_ && session_->state() != mutual_auth::State::kComplete)
      session_->abort(mutual_auth::AbortReason::kTimeout);
  }

  std::vector<std::string> output() const override {
    if (!session_) return {"no session"};
    std::string line = "session " + to_hex(session_->sid()) + ' ' + mutual_auth::state_name(session_->state());
    if (session_->output()) line += " peer=" + session_->output()->peer.str();
    return {line};
  }

  bool complete() const { return session_ && session_->state() == mutual_auth::State::kComplete; }

 private:
  std::string receiver_;
  mutual_auth::Config cfg_;
  Bytes file_;
  Beacon beacon_;
  std::unique_ptr<mutual_auth::ClientSession> session_;
};

class AirdropReceiver : public Party {
 public:
  AirdropReceiver(std::shared_ptr<const Principal> self, TrustAnchors anchors, std::vector<HierName> contacts)
      : self_(std::move(self)), anchors_(std::move(anchors)), contacts_(std::move(contacts)) {}

  std::vector<Outbound> on_frame(const std::string& from, ByteView bytes, Context& ctx) override {
    try {
      switch (wire::peek_type(bytes)) {
        case wire::FrameType::kBeacon: {
          const auto beacon = wire::decode<Beacon>(bytes);
          for (const auto& c : contacts_) {
            if (contact_hash(c) != beacon.contact_hash) continue;
            matched_ = c;
            log_.push_back("beacon matched " + c.str());
            return {{from, wire::encode(Ready{beacon.nonce})}};
          }
          log_.push_back("beacon ignored");
          return {};
        }
        case wire::FrameType::kM1: {
          if (!matched_ || session_) return {};
          auto scoped = std::make_shared<Principal>(*self_);
          scoped->policy = PrefixPolicy({*matched_});
          mutual_auth::Config cfg{scoped, anchors_, PrefixPolicy({*matched_}), AuthMode::kCacheable};
          session_ = std::make_unique<mutual_auth::ServerSession>(
              cfg, mutual_auth::make_cached_identity(*scoped, ctx.entropy));
          auto m2 = session_->on_init(wire::decode<M1>(bytes), ctx.entropy);
          if (!m2) return {};
          return {{from, wire::encode(*m2)}};
        }
        case wire::FrameType::kM3:
          if (session_) session_->on_finish(wire::decode<M3>(bytes));
          return {};
        case wire::FrameType::kAppData: {
          if (!session_ || !session_->output()) return {};
          auto pt = mutual_auth::open_app(session_->output()->keys.atk, true, wire::decode<AppData>(bytes));
          if (pt) file_ = std::move(pt);
          return {};
        }
        default: return {};
      }
    } catch (const Error&) {
      return {};
    }
  }

  void on_tick(std::uint64_t) override {
    if (session_ && session_->state() != mutual_auth::State::kComplete)
      session_->abort(mutual_auth::AbortReason::kTimeout);
  }

  std::vector<std::string> output() const override {
    std::vector<std::string> out = log_;
    if (session_) {
      std::string line = "session " + to_hex(session_->sid()) + ' ' + mutual_auth::state_name(session_->state());
      if (session_->output()) line += " peer=" + session_->output()->peer.str();
      out.push_back(line);
    }
    if (file_) out.push_back("file " + std::to_string(file_->size()) + " bytes");
    return out;
  }

  bool complete() const { return session_ && session_->state() == mutual_auth::State::kComplete; }
  const std::optional<Bytes>& file() const { return file_; }

 private:
  std::shared_ptr<const Principal> self_;
  TrustAnchors anchors_;
  std::vector<HierName> contacts_;
  std::optional<HierName> matched_;
  std::unique_ptr<mutual_auth::ServerSession> session_;
  std::optional<Bytes> file_;
  std::vector<std::string> log_;
};

}  // namespace

AirdropReport airdrop_fix_scenario(const AirdropOptions& opts) {
  SeededEntropy setup(opts.seed ^ 0x61697264726f70ull);
  const Principal root = new_root("icloud", setup);
  const HierName sender_name = HierName::parse("icloud/alice");
  const HierName receiver_name = HierName::parse("icloud/bob");
  auto sender = std::make_shared<const Principal>(make_principal(root, sender_name, setup));
  auto receiver = std::make_shared<const Principal>(make_principal(root, receiver_name, setup));
  const TrustAnchors anchors{root.trust_anchor()};

  std::vector<HierName> contacts{HierName::parse("icloud/carol")};
  if (opts.sender_is_contact) contacts.push_back(sender_name);

  mutual_auth::Config sender_cfg{sender, anchors, PrefixPolicy({HierName::parse("icloud")}), AuthMode::kCacheable};
  auto s = std::make_shared<AirdropSender>("receiver", sender_cfg, opts.file);
  auto r = std::make_shared<AirdropReceiver>(receiver, anchors, contacts);

  Fabric fabric(opts.seed, 1'700'000'000);
  fabric.add_party("sender", s);
  fabric.add_party("receiver", r);
  fabric.add_eavesdropper("eve");

  AirdropReport out;
  out.report = fabric.run({});
  out.receiver_blessing = wire::encode_body(receiver->blessing());
  out.eavesdropper_receiver_blessing_hits = transcript_scan(out.report.eavesdroppers.at("eve"), out.receiver_blessing);
  out.receiver_frames_sent = static_cast<std::size_t>(std::count_if(
      out.report.transcript.begin(), out.report.transcript.end(),
      [](const TranscriptEntry& e) { return e.from == "receiver"; }));
  out.sender_complete = s->complete();
  out.receiver_complete = r->complete();
  out.file_delivered = r->file() && *r->file() == opts.file;
  return out;
}

}  // namespace privdisc::simnet

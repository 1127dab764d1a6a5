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

#include <string>
#include <utility>
#include <vector>

#include "privdisc/discovery.hpp"
#include "privdisc/mutual_auth.hpp"
#include "privdisc/wire.hpp"
#include "support.hpp"

namespace privdisc::testing {

/// Decodes a frame by its type byte and encodes it again.
inline Bytes reencode(ByteView bytes) {
  using wire::FrameType;
  switch (wire::peek_type(bytes)) {
    case FrameType::kMasterPublicKey: return wire::encode(wire::decode<ibe::MasterPublicKey>(bytes));
    case FrameType::kMasterSecretKey: return wire::encode(wire::decode<ibe::MasterSecretKey>(bytes));
    case FrameType::kIdentityKey: return wire::encode(wire::decode<ibe::IdentityKey>(bytes));
    case FrameType::kKeyRing: return wire::encode(wire::decode<prefix::PrefixKeyRing>(bytes));
    case FrameType::kIbeCiphertext: return wire::encode(wire::decode<ibe::Ciphertext>(bytes));
    case FrameType::kBlessing: return wire::encode(wire::decode<Blessing>(bytes));
    case FrameType::kPolicy: return wire::encode(wire::decode<PrefixPolicy>(bytes));
    case FrameType::kPrefixCiphertext: return wire::encode(wire::decode<prefix::PrefixCiphertext>(bytes));
    case FrameType::kTrustAnchors: return wire::encode(wire::decode<TrustAnchors>(bytes));
    case FrameType::kSigningKey: return wire::encode(wire::decode<SigningKeyPair>(bytes));
    case FrameType::kBroadcast: return wire::encode(wire::decode<Broadcast>(bytes));
    case FrameType::kM1: return wire::encode(wire::decode<M1>(bytes));
    case FrameType::kM2: return wire::encode(wire::decode<M2>(bytes));
    case FrameType::kM3: return wire::encode(wire::decode<M3>(bytes));
    case FrameType::kAppData: return wire::encode(wire::decode<AppData>(bytes));
    case FrameType::kF1: return wire::encode(wire::decode<F1>(bytes));
    case FrameType::kF2: return wire::encode(wire::decode<F2>(bytes));
    case FrameType::kBeacon: return wire::encode(wire::decode<Beacon>(bytes));
    case FrameType::kReady: return wire::encode(wire::decode<Ready>(bytes));
  }
  throw Error(Errc::kMalformed, "unknown frame type");
}

/// Real frames of every type, produced by running the protocols.
inline std::vector<Bytes> sample_frames(std::uint64_t seed) {
  World w(seed);
  auto& rng = w.rng;
  std::vector<Bytes> out;
  const auto& root = *w.root.ibe_root;
  out.push_back(wire::encode(root.mpk));
  out.push_back(wire::encode(root.msk));
  const auto key = ibe::extract(root.msk, as_bytes("dev.v.io/u"), rng);
  out.push_back(wire::encode(key));
  out.push_back(wire::encode(ibe::encrypt(root.mpk, as_bytes("dev.v.io/u"), as_bytes("m"), rng)));
  out.push_back(wire::encode(w.anchors));
  out.push_back(wire::encode(w.root.keypair));
  out.push_back(wire::encode(PrefixPolicy::parse("dev.v.io/u/Alice,dev.v.io/u/Bob")));

  const auto client = w.member("dev.v.io/u/Alice/Phone", "dev.v.io/u");
  const auto server = w.member("dev.v.io/u/TV", "dev.v.io/u/Alice");
  out.push_back(wire::encode(client->blessing()));
  out.push_back(wire::encode(*client->keyring()));
  out.push_back(wire::encode(prefix::pe_enc(root.mpk, PrefixPolicy::parse("a,b/c"), as_bytes("p"), rng)));

  const PrefixPolicy any = PrefixPolicy::parse("dev.v.io");
  for (auto mode : {AuthMode::kCacheable, AuthMode::kUnlinkable, AuthMode::kSigmaBaseline}) {
    mutual_auth::ClientSession c({client, w.anchors, any, mode});
    mutual_auth::ServerSession s({server, w.anchors, any, mode}, mutual_auth::make_cached_identity(*server, rng));
    const auto m1 = c.start(rng);
    const auto m2 = s.on_init(m1, rng);
    const auto m3 = c.on_response(*m2);
    s.on_finish(*m3);
    out.push_back(wire::encode(m1));
    out.push_back(wire::encode(*m2));
    out.push_back(wire::encode(*m3));
    out.push_back(wire::encode(mutual_auth::seal_app(c.output()->keys.atk, c.sid(), true, 7, as_bytes("app"))));
  }

  discovery::BroadcastServer bs({server, w.anchors});
  const auto b = bs.make_broadcast(PrefixPolicy::parse("dev.v.io/u/Alice"), 600, 1000, rng);
  out.push_back(wire::encode(b));
  const auto found = discovery::process_broadcast({client, w.anchors, any}, b, 1000);
  for (bool early : {false, true}) {
    discovery::ClientConnection conn({client, w.anchors, any}, *found.service);
    std::optional<ByteView> ed;
    if (early) ed = as_bytes("early");
    const auto f1 = conn.connect(ed, 1000, rng);
    const auto acc = bs.accept(*f1, 1000, rng, early ? std::optional<ByteView>(as_bytes("reply")) : std::nullopt);
    out.push_back(wire::encode(*f1));
    out.push_back(wire::encode(*acc.f2));
  }
  out.push_back(wire::encode(Beacon{rng.draw<16>(), rng.draw<8>()}));
  out.push_back(wire::encode(Ready{rng.draw<16>()}));
  return out;
}

}  // namespace privdisc::testing

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

#include "privdisc/discovery.hpp"
#include "privdisc/wire.hpp"

namespace privdisc::testing {

// Signed fields of an advertisement.
struct BroadcastFields {
  BroadcastId bid{};
  Bytes blessing;
  dh::Element gs;
  std::uint64_t expiry = 0;
};

inline BroadcastFields genuine_fields(const Principal& server, std::uint64_t expiry, Entropy& rng) {
  BroadcastFields f;
  f.bid = rng.draw<16>();
  f.blessing = wire::encode_body(server.blessing());
  f.gs = dh::Exponent::random(rng).public_element();
  f.expiry = expiry;
  return f;
}

/// Signs `signed_fields` with the server key but ships `sent`, encrypted to
/// `policy`, so single fields can be altered under a valid encryption.
inline Broadcast forge_broadcast(const Principal& server, const PrefixPolicy& policy,
                                 const BroadcastFields& signed_fields, const BroadcastFields& sent, Entropy& rng) {
  const auto sig = sign(server.keypair, label::kBroadcast,
                        discovery::broadcast_signed_message(signed_fields.bid, signed_fields.blessing,
                                                            signed_fields.gs, signed_fields.expiry));
  return Broadcast{sent.bid, sent.expiry,
                   prefix::pe_enc(server.keyring()->mpk, policy,
                                  discovery::advert_payload(sent.blessing, sent.gs, sent.expiry, sig), rng)};
}

}  // namespace privdisc::testing

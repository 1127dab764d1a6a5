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


#include "privdisc/prefix.hpp"

namespace privdisc::prefix {

const char* pe_status_name(PeStatus s) noexcept {
  switch (s) {
    case PeStatus::kOk: return "ok";
    case PeStatus::kNotAuthorized: return "not-authorized";
    case PeStatus::kDecryptionFailed: return "decryption-failed";
  }
  return "unknown";
}

bool PrefixKeyRing::well_formed() const {
  if (keys.size() != name.depth()) return false;
  for (std::size_t i = 0; i < keys.size(); ++i)
    if (keys[i].identity != to_bytes(name.prefix(i + 1).str())) return false;
  return true;
}

bool PrefixCiphertext::well_formed() const {
  if (branches.size() != policy.size()) return false;
  for (std::size_t i = 0; i < branches.size(); ++i)
    if (!(branches[i].prefix == policy.prefixes()[i])) return false;
  return true;
}

PrefixKeyRing keyring_extract(const ibe::MasterKeyPair& root, const HierName& name,
                              Entropy& entropy) {
  PrefixKeyRing ring{name, root.mpk, {}};
  ring.keys.reserve(name.depth());
  for (std::size_t i = 1; i <= name.depth(); ++i)
    ring.keys.push_back(ibe::extract(root.msk, as_bytes(name.prefix(i).str()), entropy));
  return ring;
}

PrefixCiphertext pe_enc(const ibe::MasterPublicKey& mpk, const PrefixPolicy& policy,
                        ByteView payload, Entropy& entropy) {
  if (payload.size() > ibe::kMaxPlaintext) throw Error(Errc::kOversize, "prefix payload too large");
  PrefixCiphertext out{policy, {}};
  for (const auto& p : policy.prefixes())
    out.branches.push_back({p, ibe::encrypt(mpk, as_bytes(p.str()), payload, entropy)});
  return out;
}

PeResult pe_dec(const PrefixKeyRing& ring, const PrefixCiphertext& ct) {
  if (!satisfies(ring.name, ct.policy)) return {PeStatus::kNotAuthorized, {}};
  if (!ct.well_formed() || !ring.well_formed()) return {PeStatus::kDecryptionFailed, {}};
  for (const auto& branch : ct.branches) {
    if (!ring.name.has_prefix(branch.prefix)) continue;
    const auto& key = ring.keys[branch.prefix.depth() - 1];
    auto pt = ibe::decrypt(ring.mpk, key, branch.ct);
    if (pt) return {PeStatus::kOk, std::move(*pt)};
    return {PeStatus::kDecryptionFailed, {}};
  }
  return {PeStatus::kNotAuthorized, {}};
}

}  // namespace privdisc::prefix

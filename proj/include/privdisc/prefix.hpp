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

// Prefix encryption from IBE. A key for "s1/.../sn" is n identity keys, one
// per leading prefix, so it can open anything addressed to one of them.

#include <optional>
#include <vector>

#include "privdisc/ibe.hpp"
#include "privdisc/names.hpp"

namespace privdisc::prefix {

struct PrefixKeyRing {
  HierName name;
  ibe::MasterPublicKey mpk;
  /// keys[i].identity == name.prefix(i + 1).str()
  std::vector<ibe::IdentityKey> keys;

  bool well_formed() const;
  bool operator==(const PrefixKeyRing&) const = default;
};

struct Branch {
  HierName prefix;
  ibe::Ciphertext ct;
  bool operator==(const Branch&) const = default;
};

struct PrefixCiphertext {
  PrefixPolicy policy;  // in the clear
  std::vector<Branch> branches;  // same order as policy.prefixes()

  bool well_formed() const;
  bool operator==(const PrefixCiphertext&) const = default;
};

enum class PeStatus { kOk, kNotAuthorized, kDecryptionFailed };
const char* pe_status_name(PeStatus s) noexcept;

struct PeResult {
  PeStatus status = PeStatus::kDecryptionFailed;
  Bytes payload;
  bool ok() const { return status == PeStatus::kOk; }
};

PrefixKeyRing keyring_extract(const ibe::MasterKeyPair& root, const HierName& name,
                              Entropy& entropy);

/// Throws Error(kOversize) when the payload exceeds ibe::kMaxPlaintext.
PrefixCiphertext pe_enc(const ibe::MasterPublicKey& mpk, const PrefixPolicy& policy,
                        ByteView payload, Entropy& entropy);

/// Checks the cleartext policy first and returns kNotAuthorized without
/// touching any ciphertext when the ring's name does not satisfy it.
PeResult pe_dec(const PrefixKeyRing& ring, const PrefixCiphertext& ct);

}  // namespace privdisc::prefix

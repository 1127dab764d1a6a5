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

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/sha.h>

#include <memory>
#include <optional>
#include <string>

#include "privdisc/principals.hpp"

namespace privdisc::testing {

// Independent SHA-256 / HMAC-SHA-256 through OpenSSL, for oracle checks
// against the libsodium-backed implementations.
inline Key32 ossl_sha256(ByteView data) {
  Key32 out{};
  SHA256(data.data(), data.size(), out.data());
  return out;
}

inline Key32 ossl_tagged(std::uint8_t tag, const Bytes& data) {
  Bytes in{tag};
  in.insert(in.end(), data.begin(), data.end());
  return ossl_sha256(in);
}

inline Key32 ossl_hmac(ByteView key, ByteView msg) {
  Key32 out{};
  unsigned int len = 0;
  HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), msg.data(), msg.size(), out.data(), &len);
  return out;
}

inline Bytes cat(std::initializer_list<ByteView> parts) {
  Bytes out;
  for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// ChaCha20-Poly1305 (IETF) through OpenSSL EVP.
inline Bytes ossl_chacha_seal(const Key32& key, ByteView nonce, ByteView pt, ByteView ad) {
  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  Bytes out(pt.size() + 16);
  int len = 0;
  EVP_EncryptInit_ex(ctx, EVP_chacha20_poly1305(), nullptr, key.data(), nonce.data());
  if (!ad.empty()) EVP_EncryptUpdate(ctx, nullptr, &len, ad.data(), static_cast<int>(ad.size()));
  EVP_EncryptUpdate(ctx, out.data(), &len, pt.data(), static_cast<int>(pt.size()));
  EVP_EncryptFinal_ex(ctx, out.data() + len, &len);
  EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_AEAD_GET_TAG, 16, out.data() + pt.size());
  EVP_CIPHER_CTX_free(ctx);
  return out;
}

/// One identity provider and its members, all from a fixed seed.
class World {
 public:
  explicit World(std::uint64_t seed, std::string_view root_name = "dev.v.io")
      : rng(seed), root(new_root(root_name, rng)), anchors{root.trust_anchor()} {}

  std::shared_ptr<const Principal> member(std::string_view name, std::optional<std::string_view> policy = {}) {
    std::optional<PrefixPolicy> pol;
    if (policy) pol = PrefixPolicy::parse(*policy);
    return std::make_shared<const Principal>(make_principal(root, HierName::parse(name), rng, pol));
  }

  SeededEntropy rng;
  Principal root;
  TrustAnchors anchors;
};

}  // namespace privdisc::testing

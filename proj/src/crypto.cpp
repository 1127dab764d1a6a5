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

#include "privdisc/crypto.hpp"

#include <sodium.h>

#include <cstring>

namespace privdisc {

namespace {

struct SodiumInit {
  SodiumInit() {
    if (sodium_init() < 0) throw Error(Errc::kEntropyFailure, "libsodium initialization failed");
  }
};

}  // namespace

void ensure_sodium() { static SodiumInit init; }

void SystemEntropy::fill(std::span<std::uint8_t> out) {
  ensure_sodium();
  if (!out.empty()) randombytes_buf(out.data(), out.size());
}

SystemEntropy& system_entropy() {
  static SystemEntropy instance;
  return instance;
}

SeededEntropy::SeededEntropy(std::uint64_t seed) {
  Bytes s;
  append_u64(s, seed);
  crypto_hash_sha256(key_.data(), s.data(), s.size());
}

SeededEntropy::SeededEntropy(ByteView seed) {
  crypto_hash_sha256(key_.data(), seed.data(), seed.size());
}

SeededEntropy::~SeededEntropy() { secure_wipe(key_); }

void SeededEntropy::fill(std::span<std::uint8_t> out) {
  ensure_sodium();
  std::array<std::uint8_t, crypto_stream_chacha20_ietf_NONCEBYTES> nonce{};
  std::uint64_t c = counter_++;
  for (int i = 0; i < 8; ++i) nonce[4 + i] = static_cast<std::uint8_t>(c >> (56 - 8 * i));
  if (!out.empty()) crypto_stream_chacha20_ietf(out.data(), out.size(), nonce.data(), key_.data());
}

Key32 tagged_hash(HashDomain domain, std::initializer_list<ByteView> parts) {
  crypto_hash_sha256_state st;
  crypto_hash_sha256_init(&st);
  const auto tag = static_cast<std::uint8_t>(domain);
  crypto_hash_sha256_update(&st, &tag, 1);
  for (auto p : parts) crypto_hash_sha256_update(&st, p.data(), p.size());
  Key32 out{};
  crypto_hash_sha256_final(&st, out.data());
  return out;
}

std::array<std::uint8_t, 64> tagged_expand64(HashDomain domain, ByteView input) {
  std::array<std::uint8_t, 64> out{};
  for (std::uint8_t i = 0; i < 2; ++i) {
    const std::uint8_t idx[1] = {i};
    auto block = tagged_hash(domain, {ByteView(idx), input});
    std::memcpy(out.data() + 32 * i, block.data(), 32);
  }
  return out;
}

Key32 hmac_sha256(ByteView key, ByteView message) {
  crypto_auth_hmacsha256_state st;
  crypto_auth_hmacsha256_init(&st, key.data(), key.size());
  crypto_auth_hmacsha256_update(&st, message.data(), message.size());
  Key32 out{};
  crypto_auth_hmacsha256_final(&st, out.data());
  sodium_memzero(&st, sizeof st);
  return out;
}

Bytes prg_expand(const Key32& key, std::size_t length) {
  Bytes out;
  out.reserve(length + 32);
  for (std::uint8_t counter = 1; out.size() < length; ++counter) {
    const std::uint8_t c[1] = {counter};
    auto block = hmac_sha256(key, c);
    append(out, block);
  }
  out.resize(length);
  return out;
}

Key32 hkdf_extract(const Key32& salt, ByteView ikm) { return hmac_sha256(salt, ikm); }

namespace aead {

Nonce make_nonce(std::uint32_t dir, std::uint64_t counter) {
  Nonce n{};
  for (int i = 0; i < 4; ++i) n[i] = static_cast<std::uint8_t>(dir >> (24 - 8 * i));
  for (int i = 0; i < 8; ++i) n[4 + i] = static_cast<std::uint8_t>(counter >> (56 - 8 * i));
  return n;
}

Bytes seal(const Key32& key, const Nonce& nonce, ByteView plaintext, ByteView ad) {
  ensure_sodium();
  Bytes out(plaintext.size() + kTagSize);
  unsigned long long out_len = 0;
  crypto_aead_chacha20poly1305_ietf_encrypt(out.data(), &out_len, plaintext.data(), plaintext.size(),
                                            ad.data(), ad.size(), nullptr, nonce.data(), key.data());
  out.resize(out_len);
  return out;
}

std::optional<Bytes> open(const Key32& key, const Nonce& nonce, ByteView ciphertext, ByteView ad) {
  ensure_sodium();
  if (ciphertext.size() < kTagSize) return std::nullopt;
  Bytes out(ciphertext.size() - kTagSize);
  unsigned long long out_len = 0;
  if (crypto_aead_chacha20poly1305_ietf_decrypt(out.data(), &out_len, nullptr, ciphertext.data(),
                                                ciphertext.size(), ad.data(), ad.size(), nonce.data(),
                                                key.data()) != 0) {
    return std::nullopt;
  }
  out.resize(out_len);
  return out;
}

}  // namespace aead

}  // namespace privdisc

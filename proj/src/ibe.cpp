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

#include "privdisc/ibe.hpp"

#include <tuple>

namespace privdisc::ibe {

namespace {

Scalar fo_scalar(const Seed& seed, ByteView plaintext) {
  Bytes input(seed.begin(), seed.end());
  append(input, plaintext);
  auto wide = tagged_expand64(HashDomain::kFoScalar, input);
  secure_wipe(input);
  return Scalar::reduce(wide);
}

Seed fo_mask(const Gt& vs) {
  auto bytes = vs.to_bytes();
  return tagged_hash(HashDomain::kFoMask, {bytes});
}

Key32 fo_key(const Seed& seed) { return tagged_hash(HashDomain::kFoKey, {seed}); }

// (C1, C2) for a given FO exponent.
std::pair<G1, G1> ciphertext_elements(const MasterPublicKey& mpk, ByteView identity,
                                      const Scalar& s) {
  const G1 base = mpk.X + G1::generator() * hash_to_scalar(identity);
  return {base * s, mpk.Y * s};
}

}  // namespace

Scalar hash_to_scalar(ByteView identity) {
  return Scalar::reduce(tagged_expand64(HashDomain::kIdentityScalar, identity));
}

bool valid_public_key(const MasterPublicKey& mpk, const GroupParams& params) {
  if (mpk.X.is_identity() || mpk.Y.is_identity()) return false;
  return mpk.v == params.gt_generator;
}

MasterKeyPair setup(const GroupParams& params, Entropy& entropy) {
  MasterKeyPair kp;
  kp.msk.x = Scalar::random_nonzero(entropy);
  kp.msk.y = Scalar::random_nonzero(entropy);
  kp.mpk.X = params.g1 * kp.msk.x;
  kp.mpk.Y = params.g1 * kp.msk.y;
  kp.mpk.v = params.gt_generator;
  return kp;
}

IdentityKey extract(const MasterSecretKey& msk, ByteView identity, Entropy& entropy) {
  if (identity.empty()) throw Error(Errc::kMalformed, "identity must be non-empty");
  const Scalar h = hash_to_scalar(identity);
  for (int attempt = 0; attempt < kExtractRetries; ++attempt) {
    Scalar r = Scalar::random_nonzero(entropy);
    Scalar denom = msk.x + h + r * msk.y;
    if (denom.is_zero()) continue;
    IdentityKey key;
    key.identity.assign(identity.begin(), identity.end());
    key.r = r;
    key.K = G2::generator() * denom.inverse();
    denom.wipe();
    return key;
  }
  throw Error(Errc::kDegenerateKey, "identity key denominator degenerate after retries");
}

Ciphertext encrypt(const MasterPublicKey& mpk, ByteView identity, ByteView plaintext,
                   Entropy& entropy) {
  Seed seed = entropy.draw<kSeedSize>();
  auto ct = encrypt_with_seed(mpk, identity, plaintext, seed);
  secure_wipe(seed);
  return ct;
}

Ciphertext encrypt_with_seed(const MasterPublicKey& mpk, ByteView identity, ByteView plaintext,
                             const Seed& seed) {
  if (plaintext.size() > kMaxPlaintext) throw Error(Errc::kOversize, "IBE plaintext too large");
  Scalar s = fo_scalar(seed, plaintext);
  Ciphertext ct;
  std::tie(ct.c1, ct.c2) = ciphertext_elements(mpk, identity, s);
  Seed mask = fo_mask(mpk.v.pow(s));
  for (std::size_t i = 0; i < kSeedSize; ++i) ct.masked_seed[i] = seed[i] ^ mask[i];
  Key32 k = fo_key(seed);
  ct.sym_ct = aead::seal(k, aead::kZeroNonce, plaintext);
  secure_wipe(k);
  s.wipe();
  return ct;
}

std::optional<Bytes> decrypt(const MasterPublicKey& mpk, const IdentityKey& key,
                             const Ciphertext& ct) {
  const Gt vs = pairing::pair(ct.c1 + ct.c2 * key.r, key.K);
  Seed seed = fo_mask(vs);
  for (std::size_t i = 0; i < kSeedSize; ++i) seed[i] ^= ct.masked_seed[i];
  Key32 k = fo_key(seed);
  auto plaintext = aead::open(k, aead::kZeroNonce, ct.sym_ct);
  secure_wipe(k);
  if (!plaintext) {
    secure_wipe(seed);
    return std::nullopt;
  }
  Scalar s = fo_scalar(seed, *plaintext);
  secure_wipe(seed);
  auto [c1, c2] = ciphertext_elements(mpk, key.identity, s);
  s.wipe();
  if (!(c1 == ct.c1) || !(c2 == ct.c2)) {
    secure_wipe(*plaintext);
    return std::nullopt;
  }
  return plaintext;
}

}  // namespace privdisc::ibe

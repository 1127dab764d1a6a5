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


#include "privdisc/dh.hpp"

#include <sodium.h>

namespace privdisc::dh {

std::optional<Element> Element::from_bytes(ByteView b) {
  if (b.size() != kElementSize || !crypto_core_ristretto255_is_valid_point(b.data())) return std::nullopt;
  if (sodium_is_zero(b.data(), b.size())) return std::nullopt;  // identity
  Element e;
  std::copy(b.begin(), b.end(), e.b_.begin());
  return e;
}

Exponent Exponent::random(Entropy& entropy) {
  Exponent out;
  do {
    auto wide = entropy.draw<crypto_core_ristretto255_NONREDUCEDSCALARBYTES>();
    crypto_core_ristretto255_scalar_reduce(out.k_.data(), wide.data());
    secure_wipe(wide);
  } while (out.is_zero());
  return out;
}

std::optional<Exponent> Exponent::from_bytes(ByteView b) {
  if (b.size() != kExponentSize) return std::nullopt;
  Exponent out;
  std::copy(b.begin(), b.end(), out.k_.begin());
  // Canonical check: reducing a canonical scalar leaves it unchanged.
  std::array<std::uint8_t, crypto_core_ristretto255_NONREDUCEDSCALARBYTES> wide{};
  std::copy(b.begin(), b.end(), wide.begin());
  std::array<std::uint8_t, kExponentSize> reduced{};
  crypto_core_ristretto255_scalar_reduce(reduced.data(), wide.data());
  if (reduced != out.k_ || out.is_zero()) return std::nullopt;
  return out;
}

Element Exponent::public_element() const {
  ensure_sodium();
  Element e;
  if (crypto_scalarmult_ristretto255_base(e.b_.data(), k_.data()) != 0)
    throw Error(Errc::kDegenerateKey, "zero DH exponent");
  return e;
}

std::optional<Element> Exponent::shared(const Element& peer) const {
  ensure_sodium();
  Element e;
  if (crypto_scalarmult_ristretto255(e.b_.data(), k_.data(), peer.b_.data()) != 0) return std::nullopt;
  return e;
}

bool Exponent::is_zero() const { return sodium_is_zero(k_.data(), k_.size()) == 1; }

}  // namespace privdisc::dh

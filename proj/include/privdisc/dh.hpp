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

// Prime-order group for the Diffie-Hellman exchanges in both handshakes
// (ristretto255, via libsodium).

#include <array>
#include <optional>

#include "privdisc/bytes.hpp"
#include "privdisc/crypto.hpp"

namespace privdisc::dh {

constexpr std::size_t kElementSize = 32;
constexpr std::size_t kExponentSize = 32;

class Element {
 public:
  /// Rejects non-canonical encodings and the identity.
  static std::optional<Element> from_bytes(ByteView b);
  const std::array<std::uint8_t, kElementSize>& bytes() const { return b_; }
  ByteView view() const { return b_; }
  bool operator==(const Element&) const = default;

 private:
  std::array<std::uint8_t, kElementSize> b_{};
  friend class Exponent;
};

/// Secret exponent. Wiped on destruction.
class Exponent {
 public:
  Exponent() = default;
  Exponent(const Exponent&) = default;
  Exponent& operator=(const Exponent&) = default;
  ~Exponent() { wipe(); }

  static Exponent random(Entropy& entropy);
  static std::optional<Exponent> from_bytes(ByteView b);

  Element public_element() const;
  /// nullopt when the result is the identity.
  std::optional<Element> shared(const Element& peer) const;

  const std::array<std::uint8_t, kExponentSize>& bytes() const { return k_; }
  bool is_zero() const;
  void wipe() noexcept { secure_wipe(k_); }

 private:
  std::array<std::uint8_t, kExponentSize> k_{};
};

}  // namespace privdisc::dh

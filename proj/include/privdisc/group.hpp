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

// Value types over the BLS12-381 pairing groups, backed by blst.
// G1 and G2 use additive notation; Gt is multiplicative.

#include <blst.h>

#include <array>
#include <optional>
#include <string>

#include "privdisc/bytes.hpp"
#include "privdisc/crypto.hpp"

namespace privdisc::pairing {

constexpr std::size_t kScalarSize = 32;
constexpr std::size_t kG1Size = 48;
constexpr std::size_t kG2Size = 96;
constexpr std::size_t kGtSize = 576;

/// Element of Z_p, p the prime order of the pairing groups.
class Scalar {
 public:
  Scalar();  // zero
  static Scalar from_u64(std::uint64_t v);
  /// Interprets big-endian bytes of any length and reduces modulo p.
  static Scalar reduce(ByteView be_bytes);
  /// Strict 32-byte big-endian decoding; rejects values >= p.
  static std::optional<Scalar> from_canonical(ByteView be_bytes);
  /// Uniform in [1, p-1].
  static Scalar random_nonzero(Entropy& entropy);

  std::array<std::uint8_t, kScalarSize> to_bytes() const;  // big-endian
  bool is_zero() const;

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar inverse() const;  // zero maps to zero
  bool operator==(const Scalar& o) const;

  void wipe() noexcept;
  const blst_fr& raw() const { return v_; }

 private:
  blst_fr v_;
};

class G1 {
 public:
  G1();  // identity
  static G1 generator();
  static std::optional<G1> from_bytes(ByteView compressed);  // on-curve + subgroup
  std::array<std::uint8_t, kG1Size> to_bytes() const;
  bool is_identity() const;
  G1 operator+(const G1& o) const;
  G1 operator*(const Scalar& k) const;
  bool operator==(const G1& o) const;
  const blst_p1& raw() const { return p_; }

 private:
  blst_p1 p_;
};

class G2 {
 public:
  G2();  // identity
  static G2 generator();
  static std::optional<G2> from_bytes(ByteView compressed);
  std::array<std::uint8_t, kG2Size> to_bytes() const;
  bool is_identity() const;
  G2 operator+(const G2& o) const;
  G2 operator*(const Scalar& k) const;
  bool operator==(const G2& o) const;
  const blst_p2& raw() const { return p_; }

 private:
  blst_p2 p_;
};

class Gt {
 public:
  Gt();  // one
  /// 576-byte big-endian Fp12 encoding; rejects non-canonical limbs and
  /// elements outside the order-p subgroup.
  static std::optional<Gt> from_bytes(ByteView bytes);
  std::array<std::uint8_t, kGtSize> to_bytes() const;
  bool is_one() const;
  Gt operator*(const Gt& o) const;
  Gt pow(const Scalar& k) const;
  bool operator==(const Gt& o) const;

 private:
  friend Gt pair(const G1&, const G2&);
  blst_fp12 f_;
};

/// Optimal ate pairing e: G1 x G2 -> Gt.
Gt pair(const G1& a, const G2& b);

/// Public description of the pairing group. Only BLS12-381 is built in.
struct GroupParams {
  std::string curve_id;
  std::string order_hex;
  G1 g1;
  G2 g2;
  Gt gt_generator;

  static const GroupParams& bls12_381();
  /// Looks up a curve by identifier; throws Error(kUnsupported) otherwise.
  static const GroupParams& by_id(std::string_view curve_id);
  bool valid() const;
};

}  // namespace privdisc::pairing

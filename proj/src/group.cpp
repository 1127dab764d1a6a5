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

#include "privdisc/group.hpp"

#include <blst_aux.h>

#include <cstring>

namespace privdisc::pairing {

namespace {

// Bit length of the BLS12-381 group order.
constexpr std::size_t kOrderBits = 255;

blst_scalar to_blst_scalar(const blst_fr& fr) {
  blst_scalar s;
  blst_scalar_from_fr(&s, &fr);
  return s;
}

}  // namespace

// ---- Scalar ---------------------------------------------------------------

Scalar::Scalar() { std::memset(&v_, 0, sizeof v_); }

Scalar Scalar::from_u64(std::uint64_t v) {
  Scalar out;
  const std::uint64_t limbs[4] = {v, 0, 0, 0};
  blst_fr_from_uint64(&out.v_, limbs);
  return out;
}

Scalar Scalar::reduce(ByteView be_bytes) {
  blst_scalar s;
  blst_scalar_from_be_bytes(&s, be_bytes.data(), be_bytes.size());
  Scalar out;
  blst_fr_from_scalar(&out.v_, &s);
  secure_wipe({s.b, sizeof s.b});
  return out;
}

std::optional<Scalar> Scalar::from_canonical(ByteView be_bytes) {
  if (be_bytes.size() != kScalarSize) return std::nullopt;
  blst_scalar s;
  blst_scalar_from_bendian(&s, be_bytes.data());
  if (!blst_scalar_fr_check(&s)) {
    // blst_scalar_fr_check rejects zero as well; zero is canonical for us.
    bool all_zero = true;
    for (auto b : be_bytes) all_zero &= (b == 0);
    if (!all_zero) return std::nullopt;
    return Scalar{};
  }
  Scalar out;
  blst_fr_from_scalar(&out.v_, &s);
  return out;
}

Scalar Scalar::random_nonzero(Entropy& entropy) {
  for (;;) {
    auto wide = entropy.draw<64>();
    Scalar out = reduce(wide);
    secure_wipe(wide);
    if (!out.is_zero()) return out;
  }
}

std::array<std::uint8_t, kScalarSize> Scalar::to_bytes() const {
  std::array<std::uint8_t, kScalarSize> out{};
  blst_scalar s = to_blst_scalar(v_);
  blst_bendian_from_scalar(out.data(), &s);
  return out;
}

bool Scalar::is_zero() const {
  blst_fr zero;
  std::memset(&zero, 0, sizeof zero);
  return std::memcmp(&zero, &v_, sizeof v_) == 0;
}

Scalar Scalar::operator+(const Scalar& o) const {
  Scalar out;
  blst_fr_add(&out.v_, &v_, &o.v_);
  return out;
}

Scalar Scalar::operator-(const Scalar& o) const {
  Scalar out;
  blst_fr_sub(&out.v_, &v_, &o.v_);
  return out;
}

Scalar Scalar::operator*(const Scalar& o) const {
  Scalar out;
  blst_fr_mul(&out.v_, &v_, &o.v_);
  return out;
}

Scalar Scalar::inverse() const {
  Scalar out;
  if (is_zero()) return out;
  blst_fr_eucl_inverse(&out.v_, &v_);
  return out;
}

bool Scalar::operator==(const Scalar& o) const { return std::memcmp(&v_, &o.v_, sizeof v_) == 0; }

void Scalar::wipe() noexcept { secure_wipe({reinterpret_cast<std::uint8_t*>(&v_), sizeof v_}); }

// ---- G1 -------------------------------------------------------------------

G1::G1() { std::memset(&p_, 0, sizeof p_); }

G1 G1::generator() {
  G1 g;
  g.p_ = *blst_p1_generator();
  return g;
}

std::optional<G1> G1::from_bytes(ByteView compressed) {
  if (compressed.size() != kG1Size) return std::nullopt;
  blst_p1_affine aff;
  if (blst_p1_uncompress(&aff, compressed.data()) != BLST_SUCCESS) return std::nullopt;
  if (!blst_p1_affine_in_g1(&aff)) return std::nullopt;
  G1 out;
  blst_p1_from_affine(&out.p_, &aff);
  return out;
}

std::array<std::uint8_t, kG1Size> G1::to_bytes() const {
  std::array<std::uint8_t, kG1Size> out{};
  blst_p1_compress(out.data(), &p_);
  return out;
}

bool G1::is_identity() const { return blst_p1_is_inf(&p_); }

G1 G1::operator+(const G1& o) const {
  G1 out;
  blst_p1_add_or_double(&out.p_, &p_, &o.p_);
  return out;
}

G1 G1::operator*(const Scalar& k) const {
  G1 out;
  blst_scalar s = to_blst_scalar(k.raw());
  blst_p1_mult(&out.p_, &p_, s.b, kOrderBits);
  secure_wipe({s.b, sizeof s.b});
  return out;
}

bool G1::operator==(const G1& o) const { return blst_p1_is_equal(&p_, &o.p_); }

// ---- G2 -------------------------------------------------------------------

G2::G2() { std::memset(&p_, 0, sizeof p_); }

G2 G2::generator() {
  G2 g;
  g.p_ = *blst_p2_generator();
  return g;
}

std::optional<G2> G2::from_bytes(ByteView compressed) {
  if (compressed.size() != kG2Size) return std::nullopt;
  blst_p2_affine aff;
  if (blst_p2_uncompress(&aff, compressed.data()) != BLST_SUCCESS) return std::nullopt;
  if (!blst_p2_affine_in_g2(&aff)) return std::nullopt;
  G2 out;
  blst_p2_from_affine(&out.p_, &aff);
  return out;
}

std::array<std::uint8_t, kG2Size> G2::to_bytes() const {
  std::array<std::uint8_t, kG2Size> out{};
  blst_p2_compress(out.data(), &p_);
  return out;
}

bool G2::is_identity() const { return blst_p2_is_inf(&p_); }

G2 G2::operator+(const G2& o) const {
  G2 out;
  blst_p2_add_or_double(&out.p_, &p_, &o.p_);
  return out;
}

G2 G2::operator*(const Scalar& k) const {
  G2 out;
  blst_scalar s = to_blst_scalar(k.raw());
  blst_p2_mult(&out.p_, &p_, s.b, kOrderBits);
  secure_wipe({s.b, sizeof s.b});
  return out;
}

bool G2::operator==(const G2& o) const { return blst_p2_is_equal(&p_, &o.p_); }

// ---- Gt -------------------------------------------------------------------

Gt::Gt() { f_ = *blst_fp12_one(); }

std::optional<Gt> Gt::from_bytes(ByteView bytes) {
  if (bytes.size() != kGtSize) return std::nullopt;
  Gt out;
  // Limb order mirrors blst_bendian_from_fp12.
  const std::uint8_t* in = bytes.data();
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      blst_fp_from_bendian(&out.f_.fp6[j].fp2[i].fp[0], in);
      in += 48;
      blst_fp_from_bendian(&out.f_.fp6[j].fp2[i].fp[1], in);
      in += 48;
    }
  }
  auto reencoded = out.to_bytes();
  if (std::memcmp(reencoded.data(), bytes.data(), kGtSize) != 0) return std::nullopt;
  if (!blst_fp12_in_group(&out.f_)) return std::nullopt;
  return out;
}

std::array<std::uint8_t, kGtSize> Gt::to_bytes() const {
  std::array<std::uint8_t, kGtSize> out{};
  blst_bendian_from_fp12(out.data(), &f_);
  return out;
}

bool Gt::is_one() const { return blst_fp12_is_one(&f_); }

Gt Gt::operator*(const Gt& o) const {
  Gt out;
  blst_fp12_mul(&out.f_, &f_, &o.f_);
  return out;
}

Gt Gt::pow(const Scalar& k) const {
  // Left-to-right square-and-multiply; Gt elements are unitary so the
  // cyclotomic squaring applies.
  blst_scalar s = to_blst_scalar(k.raw());
  Gt acc;
  for (std::size_t bit = kOrderBits; bit-- > 0;) {
    blst_fp12_cyclotomic_sqr(&acc.f_, &acc.f_);
    if ((s.b[bit / 8] >> (bit % 8)) & 1) blst_fp12_mul(&acc.f_, &acc.f_, &f_);
  }
  secure_wipe({s.b, sizeof s.b});
  return acc;
}

bool Gt::operator==(const Gt& o) const { return blst_fp12_is_equal(&f_, &o.f_); }

Gt pair(const G1& a, const G2& b) {
  Gt out;
  if (a.is_identity() || b.is_identity()) return out;
  blst_p1_affine pa;
  blst_p2_affine pb;
  blst_p1_to_affine(&pa, &a.raw());
  blst_p2_to_affine(&pb, &b.raw());
  blst_fp12 ml;
  blst_miller_loop(&ml, &pb, &pa);
  blst_final_exp(&out.f_, &ml);
  return out;
}

// ---- GroupParams ----------------------------------------------------------

const GroupParams& GroupParams::bls12_381() {
  static const GroupParams params = [] {
    GroupParams p;
    p.curve_id = "BLS12-381";
    p.order_hex = "73eda753299d7d483339d80809a1d80553bda402fffe5bfeffffffff00000001";
    p.g1 = G1::generator();
    p.g2 = G2::generator();
    p.gt_generator = pair(p.g1, p.g2);
    return p;
  }();
  return params;
}

const GroupParams& GroupParams::by_id(std::string_view curve_id) {
  if (curve_id == "BLS12-381") return bls12_381();
  throw Error(Errc::kUnsupported, "unsupported pairing curve: " + std::string(curve_id));
}

bool GroupParams::valid() const {
  if (g1.is_identity() || g2.is_identity()) return false;
  if (!blst_p1_in_g1(&g1.raw()) || !blst_p2_in_g2(&g2.raw())) return false;
  return !gt_generator.is_one() && gt_generator == pair(g1, g2);
}

}  // namespace privdisc::pairing

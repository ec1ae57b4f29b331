#include "ags/crypto/curve.hpp"

#include "ags/error.hpp"

namespace ags::crypto {

namespace {

mpz_class mod(const mpz_class& v, const mpz_class& m) {
  mpz_class r = v % m;
  if (r < 0) r += m;
  return r;
}

mpz_class inverse(const mpz_class& v, const mpz_class& m) {
  mpz_class r;
  if (mpz_invert(r.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t()) == 0)
    throw Error(ErrorCode::invalid, "value has no modular inverse");
  return r;
}

CurveParams make_toy() {
  return {"toy", 17, 2, 2, ECPoint(5, 1), 19, 1, 1};
}

CurveParams make_secp256k1() {
  return {"secp256k1",
          mpz_class("fffffffffffffffffffffffffffffffffffffffffffffffffffffffefffffc2f", 16),
          0,
          7,
          ECPoint(mpz_class("79be667ef9dcbbac55a06295ce870b07029bfcdb2dce28d959f2815b16f81798", 16),
                  mpz_class("483ada7726a3c4655da4fbfc0e1108a8fd17b448a68554199c47d08ffb10d4b8", 16)),
          mpz_class("fffffffffffffffffffffffffffffffebaaedce6af48a03bbfd25e8cd0364141", 16),
          32,
          32};
}

// Group law without the on-curve precondition checks; inputs are trusted.
ECPoint add_unchecked(const ECPoint& P, const ECPoint& Q, const CurveParams& c) {
  if (P.is_infinity()) return Q;
  if (Q.is_infinity()) return P;
  mpz_class slope;
  if (P.x() == Q.x()) {
    if (mod(P.y() + Q.y(), c.p) == 0) return ECPoint::infinity();
    slope = mod((3 * P.x() * P.x() + c.a) * inverse(2 * P.y(), c.p), c.p);
  } else {
    slope = mod((Q.y() - P.y()) * inverse(mod(Q.x() - P.x(), c.p), c.p), c.p);
  }
  mpz_class x3 = mod(slope * slope - P.x() - Q.x(), c.p);
  mpz_class y3 = mod(slope * (P.x() - x3) - P.y(), c.p);
  return {std::move(x3), std::move(y3)};
}

}  // namespace

const CurveParams& toy_curve() {
  static const CurveParams curve = make_toy();
  return curve;
}

const CurveParams& secp256k1() {
  static const CurveParams curve = make_secp256k1();
  return curve;
}

const CurveParams& curve_by_name(std::string_view name) {
  if (name == "toy") return toy_curve();
  if (name == "secp256k1") return secp256k1();
  throw Error(ErrorCode::invalid, "unknown curve: " + std::string(name));
}

bool curve_is_valid(const CurveParams& curve) {
  const mpz_class disc = mod(4 * curve.a * curve.a * curve.a + 27 * curve.b * curve.b, curve.p);
  if (disc == 0) return false;
  if (curve.G.is_infinity() || !on_curve(curve.G, curve)) return false;
  return scalar_mul(curve.n, curve.G, curve).is_infinity();
}

bool on_curve(const ECPoint& point, const CurveParams& curve) {
  if (point.is_infinity()) return true;
  const mpz_class& x = point.x();
  const mpz_class& y = point.y();
  if (x < 0 || x >= curve.p || y < 0 || y >= curve.p) return false;
  return mod(y * y - (x * x * x + curve.a * x + curve.b), curve.p) == 0;
}

ECPoint ec_negate(const ECPoint& point, const CurveParams& curve) {
  if (point.is_infinity()) return point;
  return {point.x(), mod(-point.y(), curve.p)};
}

ECPoint ec_add(const ECPoint& lhs, const ECPoint& rhs, const CurveParams& curve) {
  if (!on_curve(lhs, curve) || !on_curve(rhs, curve))
    throw Error(ErrorCode::invalid, "point is not on curve " + curve.name);
  return add_unchecked(lhs, rhs, curve);
}

ECPoint scalar_mul(const mpz_class& k, const ECPoint& point, const CurveParams& curve) {
  if (k < 0) throw Error(ErrorCode::invalid, "scalar must be non-negative");
  if (!on_curve(point, curve)) throw Error(ErrorCode::invalid, "point is not on curve " + curve.name);
  ECPoint acc;
  for (auto bit = static_cast<long>(mpz_sizeinbase(k.get_mpz_t(), 2)) - 1; bit >= 0; --bit) {
    acc = add_unchecked(acc, acc, curve);
    if (mpz_tstbit(k.get_mpz_t(), static_cast<mp_bitcnt_t>(bit))) acc = add_unchecked(acc, point, curve);
  }
  return acc;
}

Bytes to_fixed_be(const mpz_class& value, std::size_t width) {
  if (value < 0) throw Error(ErrorCode::invalid, "cannot serialize a negative integer");
  const std::size_t needed = (mpz_sizeinbase(value.get_mpz_t(), 2) + 7) / 8;
  if (value != 0 && needed > width) throw Error(ErrorCode::invalid, "integer does not fit fixed width");
  Bytes out(width, 0);
  if (value != 0) {
    std::size_t count = 0;
    mpz_export(out.data() + (width - needed), &count, 1, 1, 1, 0, value.get_mpz_t());
  }
  return out;
}

mpz_class from_be(ByteView bytes) {
  mpz_class v;
  if (!bytes.empty()) mpz_import(v.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  return v;
}

}  // namespace ags::crypto

#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "ags/bytes.hpp"

namespace ags::crypto {

// Affine point on a short Weierstrass curve, or the point at infinity.
class ECPoint {
 public:
  ECPoint() = default;  // infinity
  ECPoint(mpz_class x, mpz_class y) : infinity_(false), x_(std::move(x)), y_(std::move(y)) {}

  static ECPoint infinity() { return {}; }

  bool is_infinity() const { return infinity_; }
  const mpz_class& x() const { return x_; }
  const mpz_class& y() const { return y_; }

  friend bool operator==(const ECPoint& a, const ECPoint& b) {
    if (a.infinity_ || b.infinity_) return a.infinity_ == b.infinity_;
    return a.x_ == b.x_ && a.y_ == b.y_;
  }

 private:
  bool infinity_ = true;
  mpz_class x_;
  mpz_class y_;
};

// y^2 = x^3 + ax + b over F_p with a generator G of prime order n.
struct CurveParams {
  std::string name;
  mpz_class p;
  mpz_class a;
  mpz_class b;
  ECPoint G;
  mpz_class n;
  std::size_t field_bytes;  // fixed width of a serialized coordinate
  std::size_t order_bytes;  // fixed width of a serialized scalar
};

// p=17, a=2, b=2, G=(5,1), n=19: small enough to enumerate.
const CurveParams& toy_curve();
const CurveParams& secp256k1();

// "toy" or "secp256k1"; throws Error(invalid) otherwise.
const CurveParams& curve_by_name(std::string_view name);

// Checks the non-singularity and generator invariants, including n*G = O.
bool curve_is_valid(const CurveParams& curve);

bool on_curve(const ECPoint& point, const CurveParams& curve);

ECPoint ec_negate(const ECPoint& point, const CurveParams& curve);

// Group law. Throws Error(invalid) if either point is not on `curve`, which is
// how points from a different curve are caught.
ECPoint ec_add(const ECPoint& lhs, const ECPoint& rhs, const CurveParams& curve);

// Left-to-right double-and-add. k must be non-negative; k is not reduced mod n.
ECPoint scalar_mul(const mpz_class& k, const ECPoint& point, const CurveParams& curve);

// Unsigned big-endian, left-padded to `width` bytes.
Bytes to_fixed_be(const mpz_class& value, std::size_t width);
mpz_class from_be(ByteView bytes);

}  // namespace ags::crypto

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "ags/bytes.hpp"
#include "ags/crypto/curve.hpp"

namespace ags::crypto {

class PrivateKey {
 public:
  // Throws Error(invalid) unless 1 <= d <= n-1.
  PrivateKey(const CurveParams& curve, mpz_class d);

  // Draws d uniformly from [1, n-1] using std::random_device.
  static PrivateKey generate(const CurveParams& curve);

  // Key file body: "<curve-name> <64 lowercase hex chars of d>\n".
  static PrivateKey parse_key_file(std::string_view text);
  std::string key_file() const;

  const CurveParams& curve() const { return *curve_; }
  const mpz_class& scalar() const { return d_; }

 private:
  const CurveParams* curve_;
  mpz_class d_;
};

class PublicKey {
 public:
  // Throws Error(invalid) if q is infinity or not on the curve.
  PublicKey(const CurveParams& curve, ECPoint q);

  // 0x04 || x || y, coordinates fixed-width big-endian.
  Bytes serialize() const;
  static PublicKey parse(const CurveParams& curve, ByteView bytes);
  std::string hex() const { return to_hex(serialize()); }

  const CurveParams& curve() const { return *curve_; }
  const ECPoint& point() const { return q_; }

  friend bool operator==(const PublicKey& a, const PublicKey& b) {
    return a.curve_ == b.curve_ && a.q_ == b.q_;
  }

 private:
  const CurveParams* curve_;
  ECPoint q_;
};

struct Signature {
  mpz_class r;
  mpz_class s;

  // r || s, each order_bytes wide, big-endian.
  Bytes to_bytes(const CurveParams& curve) const;
  std::string hex(const CurveParams& curve) const { return to_hex(to_bytes(curve)); }
  // Length must be exactly 2 * order_bytes; range is checked by verify.
  static Signature from_bytes(const CurveParams& curve, ByteView bytes);

  friend bool operator==(const Signature& a, const Signature& b) { return a.r == b.r && a.s == b.s; }
};

// Q = dG.
PublicKey derive_public(const PrivateKey& priv);

// Digest read as a big-endian integer, reduced mod n.
mpz_class digest_to_scalar(const Digest& z, const CurveParams& curve);

// Deterministic nonce in [1, n-1]: two HMAC-SHA256 blocks keyed by d over
// (z || counter || block index), reduced mod n-1 and shifted by one.
mpz_class derive_nonce(const PrivateKey& priv, const Digest& z, std::uint32_t counter);

// r = x1 mod n where (x1, y1) = kG; s = k^-1 (z + r d) mod n. The nonce
// counter advances whenever r or s comes out zero.
Signature sign(const PrivateKey& priv, const Digest& z);

// Never throws for out-of-range r or s; those simply fail.
bool verify(const PublicKey& pub, const Digest& z, const Signature& sig);

}  // namespace ags::crypto

#include "ags/crypto/ecdsa.hpp"

#include <random>

#include "ags/crypto/hash.hpp"
#include "ags/error.hpp"

namespace ags::crypto {

namespace {

constexpr std::uint32_t kMaxNonceAttempts = 128;

mpz_class mod(const mpz_class& v, const mpz_class& m) {
  mpz_class r = v % m;
  if (r < 0) r += m;
  return r;
}

mpz_class invert(const mpz_class& v, const mpz_class& m) {
  mpz_class r;
  mpz_invert(r.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t());
  return r;
}

}  // namespace

PrivateKey::PrivateKey(const CurveParams& curve, mpz_class d) : curve_(&curve), d_(std::move(d)) {
  if (d_ < 1 || d_ >= curve.n) throw Error(ErrorCode::invalid, "private scalar outside [1, n-1]");
}

PrivateKey PrivateKey::generate(const CurveParams& curve) {
  std::random_device rd;
  Bytes raw(64);
  for (auto& b : raw) b = static_cast<std::uint8_t>(rd());
  mpz_class d = mod(from_be(raw), curve.n - 1) + 1;
  return {curve, d};
}

PrivateKey PrivateKey::parse_key_file(std::string_view text) {
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' ')) text.remove_suffix(1);
  const auto space = text.find(' ');
  if (space == std::string_view::npos) throw Error(ErrorCode::invalid, "key file must be '<curve> <hex>'");
  const CurveParams& curve = curve_by_name(text.substr(0, space));
  const std::string_view hex = text.substr(space + 1);
  if (hex.size() != 64) throw Error(ErrorCode::invalid, "key file scalar must be 64 hex characters");
  return {curve, from_be(from_hex(hex))};
}

std::string PrivateKey::key_file() const {
  return curve_->name + " " + to_hex(to_fixed_be(d_, 32)) + "\n";
}

PublicKey::PublicKey(const CurveParams& curve, ECPoint q) : curve_(&curve), q_(std::move(q)) {
  if (q_.is_infinity() || !on_curve(q_, curve)) throw Error(ErrorCode::invalid, "public key is not a curve point");
}

Bytes PublicKey::serialize() const {
  Bytes out{0x04};
  append(out, to_fixed_be(q_.x(), curve_->field_bytes));
  append(out, to_fixed_be(q_.y(), curve_->field_bytes));
  return out;
}

PublicKey PublicKey::parse(const CurveParams& curve, ByteView bytes) {
  if (bytes.size() != 1 + 2 * curve.field_bytes || bytes[0] != 0x04)
    throw Error(ErrorCode::invalid, "public key must be uncompressed 0x04||x||y");
  return {curve, ECPoint(from_be(bytes.subspan(1, curve.field_bytes)),
                         from_be(bytes.subspan(1 + curve.field_bytes, curve.field_bytes)))};
}

Bytes Signature::to_bytes(const CurveParams& curve) const {
  Bytes out = to_fixed_be(r, curve.order_bytes);
  append(out, to_fixed_be(s, curve.order_bytes));
  return out;
}

Signature Signature::from_bytes(const CurveParams& curve, ByteView bytes) {
  if (bytes.size() != 2 * curve.order_bytes) throw Error(ErrorCode::invalid, "signature has wrong length");
  return {from_be(bytes.first(curve.order_bytes)), from_be(bytes.subspan(curve.order_bytes))};
}

PublicKey derive_public(const PrivateKey& priv) {
  return {priv.curve(), scalar_mul(priv.scalar(), priv.curve().G, priv.curve())};
}

mpz_class digest_to_scalar(const Digest& z, const CurveParams& curve) {
  return mod(from_be(z.view()), curve.n);
}

mpz_class derive_nonce(const PrivateKey& priv, const Digest& z, std::uint32_t counter) {
  const CurveParams& curve = priv.curve();
  const Bytes key = to_fixed_be(priv.scalar(), curve.order_bytes);
  Bytes msg;
  append(msg, z.view());
  append_be32(msg, counter);
  msg.push_back(0);
  Bytes wide;
  for (std::uint8_t block = 0; block < 2; ++block) {
    msg.back() = block;
    append(wide, hmac_sha256(key, msg).view());
  }
  return mod(from_be(wide), curve.n - 1) + 1;
}

Signature sign(const PrivateKey& priv, const Digest& z) {
  const CurveParams& curve = priv.curve();
  const mpz_class e = digest_to_scalar(z, curve);
  for (std::uint32_t counter = 0; counter < kMaxNonceAttempts; ++counter) {
    const mpz_class k = derive_nonce(priv, z, counter);
    const ECPoint R = scalar_mul(k, curve.G, curve);
    mpz_class r = mod(R.x(), curve.n);
    if (r == 0) continue;
    mpz_class s = mod(invert(k, curve.n) * (e + r * priv.scalar()), curve.n);
    if (s == 0) continue;
    return {std::move(r), std::move(s)};
  }
  throw std::runtime_error("ECDSA nonce derivation exhausted its attempts");
}

bool verify(const PublicKey& pub, const Digest& z, const Signature& sig) {
  const CurveParams& curve = pub.curve();
  if (sig.r < 1 || sig.r >= curve.n || sig.s < 1 || sig.s >= curve.n) return false;
  const mpz_class e = digest_to_scalar(z, curve);
  const mpz_class w = invert(sig.s, curve.n);
  const mpz_class u1 = mod(e * w, curve.n);
  const mpz_class u2 = mod(sig.r * w, curve.n);
  const ECPoint X = ec_add(scalar_mul(u1, curve.G, curve), scalar_mul(u2, pub.point(), curve), curve);
  if (X.is_infinity()) return false;
  return mod(X.x(), curve.n) == sig.r;
}

}  // namespace ags::crypto

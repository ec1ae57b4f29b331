#include <doctest.h>

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ags/crypto/address.hpp"
#include "ags/crypto/curve.hpp"
#include "ags/crypto/ecdsa.hpp"
#include "ags/crypto/hash.hpp"
#include "ags/crypto/security.hpp"
#include "ags/error.hpp"
#include "openssl_oracle.hpp"
#include "toy_model.hpp"

using namespace ags;
using namespace ags::crypto;
using namespace ags::testing::toy;

namespace {

Digest digest_of_int(unsigned v) {
  Digest d;
  d.bytes()[31] = static_cast<std::uint8_t>(v & 0xff);
  d.bytes()[30] = static_cast<std::uint8_t>(v >> 8);
  return d;
}

std::string hex_of(const mpz_class& v) { return v.get_str(16); }

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  Bytes out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

}  // namespace

TEST_CASE("sha256: published vectors") {
  CHECK(sha256("").hex() == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256("abc").hex() == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq").hex() ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
  CHECK(sha256(std::string(1000000, 'a')).hex() ==
        "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("sha256: agrees with openssl across padding boundaries") {
  std::mt19937_64 rng(7);
  for (std::size_t len = 0; len <= 300; ++len) {
    const Bytes data = random_bytes(rng, len);
    CHECK(to_hex(sha256(data).view()) == to_hex(oracle::sha256(data)));
  }
}

TEST_CASE("sha256: streaming in uneven chunks equals one shot") {
  std::mt19937_64 rng(11);
  const Bytes data = random_bytes(rng, 1000);
  Sha256 h;
  std::size_t pos = 0, step = 1;
  while (pos < data.size()) {
    const std::size_t take = std::min(step, data.size() - pos);
    h.update(ByteView(data.data() + pos, take));
    pos += take;
    step = step * 3 % 97 + 1;
  }
  CHECK(h.finalize() == sha256(data));
}

TEST_CASE("sha256: one flipped bit changes the digest") {
  Bytes data(64, 0x5a);
  const Digest base = sha256(data);
  for (std::size_t bit = 0; bit < data.size() * 8; ++bit) {
    Bytes mutated = data;
    mutated[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    CHECK(sha256(mutated) != base);
  }
}

TEST_CASE("ripemd160: published vectors") {
  CHECK(to_hex(ripemd160("")) == "9c1185a5c5e9fc54612808977ee8f548b2258d31");
  CHECK(to_hex(ripemd160("a")) == "0bdc9d2d256b3ee9daae347be6f4dc835a467ffe");
  CHECK(to_hex(ripemd160("abc")) == "8eb208f7e05d987a9b044a8e98c6b087f15a0bfc");
  CHECK(to_hex(ripemd160("message digest")) == "5d0689ef49d2fae572b881b123a85ffa21595f36");
  CHECK(to_hex(ripemd160(std::string(1000000, 'a'))) == "52783243c1697bdbe16d37f97f68f08325dc1528");
}

TEST_CASE("ripemd160: agrees with openssl and is deterministic") {
  std::mt19937_64 rng(3);
  for (std::size_t len = 0; len <= 200; ++len) {
    const Bytes data = random_bytes(rng, len);
    const auto first = ripemd160(data);
    CHECK(first == ripemd160(data));
    CHECK(to_hex(first) == to_hex(oracle::ripemd160(data)));
  }
}

TEST_CASE("hmac_sha256: RFC 4231 case 2 and openssl") {
  CHECK(hmac_sha256(as_bytes("Jefe"), as_bytes("what do ya want for nothing?")).hex() ==
        "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
  std::mt19937_64 rng(5);
  for (std::size_t klen : {0u, 1u, 32u, 64u, 65u, 131u}) {
    const Bytes key = random_bytes(rng, klen);
    const Bytes msg = random_bytes(rng, 77);
    CHECK(hmac_sha256(key, msg).hex() == to_hex(oracle::hmac_sha256(key, msg)));
  }
}

TEST_CASE("curve: bundled parameters satisfy their invariants") {
  CHECK(curve_is_valid(toy_curve()));
  CHECK(curve_is_valid(secp256k1()));
  CHECK(&curve_by_name("toy") == &toy_curve());
  CHECK_THROWS_AS(curve_by_name("p256"), Error);
}

TEST_CASE("curve: toy group table matches brute-force enumeration") {
  const CurveParams& c = toy_curve();
  const auto pts = toy_points();
  REQUIRE(pts.size() == 19);  // prime order, so every non-identity point generates
  for (const auto& a : pts) {
    for (const auto& b : pts) CHECK(ec_add(to_ec(a), to_ec(b), c) == to_ec(toy_add(a, b)));
  }
  // G + G from the table.
  CHECK(ec_add(c.G, c.G, c) == ECPoint(6, 3));
}

TEST_CASE("curve: group laws hold exhaustively on the toy curve") {
  const CurveParams& c = toy_curve();
  std::vector<ECPoint> pts;
  for (const auto& p : toy_points()) pts.push_back(to_ec(p));
  for (const auto& a : pts) {
    CHECK(ec_add(a, ECPoint::infinity(), c) == a);
    CHECK(ec_add(a, ec_negate(a, c), c).is_infinity());
    for (const auto& b : pts) {
      CHECK(ec_add(a, b, c) == ec_add(b, a, c));
      for (const auto& d : pts) CHECK(ec_add(ec_add(a, b, c), d, c) == ec_add(a, ec_add(b, d, c), c));
    }
  }
}

TEST_CASE("curve: double-and-add equals repeated addition for k in [0, n]") {
  const CurveParams& c = toy_curve();
  ECPoint acc;
  for (int k = 0; k <= 19; ++k) {
    CHECK(scalar_mul(k, c.G, c) == acc);
    CHECK(scalar_mul(k, c.G, c) == to_ec(toy_mul(k)));
    acc = ec_add(acc, c.G, c);
  }
  CHECK(scalar_mul(1, c.G, c) == c.G);
  CHECK(scalar_mul(c.n, c.G, c).is_infinity());
  CHECK(scalar_mul(secp256k1().n, secp256k1().G, secp256k1()).is_infinity());
}

TEST_CASE("curve: points from another curve are rejected") {
  CHECK_THROWS_AS(ec_add(secp256k1().G, toy_curve().G, toy_curve()), Error);
  CHECK_THROWS_AS(ec_add(ECPoint(1, 1), toy_curve().G, toy_curve()), Error);
  CHECK_THROWS_AS(scalar_mul(-1, toy_curve().G, toy_curve()), Error);
}

TEST_CASE("derive_public: toy and secp256k1") {
  CHECK(derive_public(PrivateKey(toy_curve(), 1)).point() == toy_curve().G);
  CHECK(derive_public(PrivateKey(toy_curve(), 2)).point() == ECPoint(6, 3));
  const ECPoint g = derive_public(PrivateKey(secp256k1(), 1)).point();
  CHECK(hex_of(g.x()) == "79be667ef9dcbbac55a06295ce870b07029bfcdb2dce28d959f2815b16f81798");
  CHECK(hex_of(g.y()) == "483ada7726a3c4655da4fbfc0e1108a8fd17b448a68554199c47d08ffb10d4b8");
  const auto [ox, oy] = oracle::secp256k1_public("1");
  CHECK(ox == hex_of(g.x()));
  CHECK(oy == hex_of(g.y()));
}

TEST_CASE("derive_public: random secp256k1 scalars agree with openssl") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 10; ++i) {
    const PrivateKey priv(secp256k1(), from_be(random_bytes(rng, 31)) + 1);
    const ECPoint q = derive_public(priv).point();
    const auto [ox, oy] = oracle::secp256k1_public(hex_of(priv.scalar()));
    CHECK(ox == hex_of(q.x()));
    CHECK(oy == hex_of(q.y()));
  }
}

TEST_CASE("keys: range checks and serialization") {
  CHECK_THROWS_AS(PrivateKey(toy_curve(), 0), Error);
  CHECK_THROWS_AS(PrivateKey(toy_curve(), 19), Error);
  const PrivateKey priv(secp256k1(), mpz_class("123456789abcdef", 16));
  const PrivateKey reread = PrivateKey::parse_key_file(priv.key_file());
  CHECK(reread.scalar() == priv.scalar());
  CHECK(&reread.curve() == &secp256k1());
  CHECK(priv.key_file().size() == std::string("secp256k1 ").size() + 64 + 1);
  const PublicKey pub = derive_public(priv);
  CHECK(pub.serialize().size() == 65);
  CHECK(PublicKey::parse(secp256k1(), pub.serialize()) == pub);
  CHECK(derive_public(PrivateKey(toy_curve(), 2)).hex() == "040603");
  CHECK_THROWS_AS(PublicKey::parse(toy_curve(), from_hex("040101")), Error);
  const PrivateKey fresh = PrivateKey::generate(toy_curve());
  CHECK(fresh.scalar() >= 1);
  CHECK(fresh.scalar() <= 18);
}

TEST_CASE("ecdsa: toy signatures match hand evaluation of r and s") {
  const CurveParams& c = toy_curve();
  for (int d = 1; d < 19; ++d) {
    const PrivateKey priv(c, d);
    for (unsigned zi = 0; zi < 19; ++zi) {
      const Digest z = digest_of_int(zi);
      // Expected: first counter whose nonce yields nonzero r and s.
      std::optional<std::pair<int, int>> expected;
      for (std::uint32_t counter = 0; !expected; ++counter) {
        const int k = static_cast<int>(derive_nonce(priv, z, counter).get_si());
        REQUIRE(k >= 1);
        REQUIRE(k <= 18);
        const ToyPoint R = toy_mul(k);
        const int r = md(R.x, 19);
        if (r == 0) continue;
        const int s = md(inv_mod(k, 19) * (static_cast<int>(zi) + r * d), 19);
        if (s == 0) continue;
        expected = std::make_pair(r, s);
      }
      const Signature sig = sign(priv, z);
      CHECK(sig.r == expected->first);
      CHECK(sig.s == expected->second);
      CHECK(verify(derive_public(priv), z, sig));
    }
  }
}

TEST_CASE("ecdsa: swapped r and s judged exactly as direct evaluation says") {
  const CurveParams& c = toy_curve();
  int rejected = 0;
  for (int d = 1; d < 19; ++d) {
    const PrivateKey priv(c, d);
    const PublicKey pub = derive_public(priv);
    const ToyPoint Q{false, static_cast<int>(pub.point().x().get_si()), static_cast<int>(pub.point().y().get_si())};
    for (unsigned zi = 0; zi < 19; ++zi) {
      const Signature sig = sign(priv, digest_of_int(zi));
      const Signature swapped{sig.s, sig.r};
      const bool expected = toy_verify(Q, static_cast<int>(zi), static_cast<int>(sig.s.get_si()),
                                       static_cast<int>(sig.r.get_si()));
      CHECK(verify(pub, digest_of_int(zi), swapped) == expected);
      rejected += expected ? 0 : 1;
    }
  }
  CHECK(rejected > 0);
  // On secp256k1 a swap is always fatal.
  const PrivateKey priv(secp256k1(), 987654321);
  const Digest z = sha256("swap");
  const Signature sig = sign(priv, z);
  CHECK_FALSE(verify(derive_public(priv), z, Signature{sig.s, sig.r}));
}

TEST_CASE("ecdsa: deterministic and round-trips on secp256k1") {
  const PrivateKey priv(secp256k1(), mpz_class("c0ffee", 16));
  const PublicKey pub = derive_public(priv);
  const Digest z = sha256("measurement report");
  const Signature a = sign(priv, z);
  const Signature b = sign(priv, z);
  CHECK(a == b);
  CHECK(a.to_bytes(secp256k1()) == b.to_bytes(secp256k1()));
  CHECK(verify(pub, z, a));
  CHECK(Signature::from_bytes(secp256k1(), a.to_bytes(secp256k1())) == a);
  CHECK_THROWS_AS(Signature::from_bytes(secp256k1(), Bytes(63)), Error);
}

TEST_CASE("ecdsa: every single-bit flip of z or of the signature is rejected") {
  const PrivateKey priv(secp256k1(), 42);
  const PublicKey pub = derive_public(priv);
  const Digest z = sha256("flip me");
  const Signature sig = sign(priv, z);
  for (int bit = 0; bit < 256; bit += 7) {
    Digest mutated = z;
    mutated.bytes()[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    CHECK_FALSE(verify(pub, mutated, sig));
  }
  const Bytes wire = sig.to_bytes(secp256k1());
  for (std::size_t bit = 0; bit < wire.size() * 8; bit += 5) {
    Bytes mutated = wire;
    mutated[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    CHECK_FALSE(verify(pub, z, Signature::from_bytes(secp256k1(), mutated)));
  }
}

TEST_CASE("ecdsa: out-of-range components reject without throwing") {
  const PrivateKey priv(secp256k1(), 7);
  const PublicKey pub = derive_public(priv);
  const Digest z = sha256("range");
  const Signature sig = sign(priv, z);
  CHECK_FALSE(verify(pub, z, Signature{0, sig.s}));
  CHECK_FALSE(verify(pub, z, Signature{sig.r, 0}));
  CHECK_FALSE(verify(pub, z, Signature{secp256k1().n, sig.s}));
  CHECK_FALSE(verify(pub, z, Signature{sig.r, secp256k1().n + sig.s}));
}

TEST_CASE("ecdsa: cross-verification with openssl") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 10; ++i) {
    const PrivateKey priv(secp256k1(), from_be(random_bytes(rng, 32)) % (secp256k1().n - 1) + 1);
    const Digest z = Digest::from_bytes(random_bytes(rng, 32));
    const Signature ours = sign(priv, z);
    CHECK(oracle::secp256k1_verify(hex_of(priv.scalar()), z.view(), hex_of(ours.r), hex_of(ours.s)));
    const auto [r, s] = oracle::secp256k1_sign(hex_of(priv.scalar()), z.view());
    CHECK(verify(derive_public(priv), z, Signature{mpz_class(r, 16), mpz_class(s, 16)}));
  }
}

TEST_CASE("base58: vectors and leading zeros") {
  CHECK(base58_encode(as_bytes("Hello World!")) == "2NEpo7TZRRrLZSi2U");
  CHECK(base58_encode(Bytes{}).empty());
  CHECK(base58_encode(Bytes{0}) == "1");
  CHECK(base58_encode(Bytes{0, 0, 1}) == "112");
  CHECK(base58_decode("112") == Bytes{0, 0, 1});
  CHECK_THROWS_AS(base58_decode("0OIl"), Error);
  CHECK(base58check_encode(Bytes(21, 0)) == "1111111111111111111114oLvT2");
  CHECK(base58check_decode("1111111111111111111114oLvT2") == Bytes(21, 0));
}

TEST_CASE("base58check: random round trips") {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 1000; ++i) {
    Bytes data = random_bytes(rng, rng() % 40);
    const std::size_t zeros = rng() % 4;
    data.insert(data.begin(), zeros, 0);
    const std::string text = base58check_encode(data);
    CHECK(base58check_decode(text) == data);
    CHECK(text.substr(0, zeros) == std::string(zeros, '1'));
  }
}

TEST_CASE("address: derivation pipeline") {
  const Address g = derive_address(derive_public(PrivateKey(secp256k1(), 1)));
  CHECK(g.text() == "1EHNa6Q4Jz2uvNExL497mE43ikXhwF6kZm");
  CHECK(derive_address(derive_public(PrivateKey(toy_curve(), 2))).text() == "1Nm6JJTvbZ87e4k6bF1h2TrbwD6okN4j1j");
  const Address parsed = Address::parse(g.text());
  CHECK(parsed == g);
  CHECK(parsed.version() == 0);
  const Address v111 = derive_address(derive_public(PrivateKey(secp256k1(), 1)), 111);
  CHECK(v111.version() == 111);
  CHECK(v111.payload() == g.payload());
}

TEST_CASE("address: altering any one character breaks decoding") {
  const std::string text = derive_address(derive_public(PrivateKey(secp256k1(), 99))).text();
  const std::string alphabet = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";
  for (std::size_t i = 0; i < text.size(); ++i) {
    std::string altered = text;
    altered[i] = alphabet[(alphabet.find(text[i]) + 1) % alphabet.size()];
    CHECK_THROWS_AS(Address::parse(altered), Error);
  }
}

TEST_CASE("collision_probability: birthday bound") {
  CHECK(collision_probability(0, 365) == 0.0);
  CHECK(collision_probability(1, 365) == 0.0);
  CHECK(collision_probability(366, 365) == 1.0);
  CHECK(collision_probability(23, 365) == doctest::Approx(0.5072972343239854).epsilon(1e-12));
  CHECK(collision_probability(22, 365) < 0.5);
  double prev = 0.0;
  for (std::uint64_t n = 0; n <= 400; ++n) {
    const double p = collision_probability(n, 365);
    CHECK(p >= prev);
    CHECK(p <= 1.0);
    prev = p;
  }
  CHECK_THROWS_AS(collision_probability(1, 0), Error);
}

TEST_CASE("key_space_size: exact powers of two") {
  CHECK(key_space_size(0) == 1);
  CHECK(key_space_size(8) == 256);
  const std::string big = key_space_size(256).get_str();
  CHECK(big == "115792089237316195423570985008687907853269984665640564039457584007913129639936");
  CHECK(big.size() == 78);
}

#include <doctest.h>

#include <gmpxx.h>

#include <random>

#include "ags/bytes.hpp"
#include "ags/decimal.hpp"
#include "ags/error.hpp"
#include "ags/timeutil.hpp"

using namespace ags;

namespace {

mpz_class to_mpz(Decimal::Int v) {
  const bool neg = v < 0;
  std::string digits;
  do {
    const int d = static_cast<int>(v % 10);
    digits.insert(digits.begin(), static_cast<char>('0' + (neg ? -d : d)));
    v /= 10;
  } while (v != 0);
  mpz_class out(digits);
  return neg ? mpz_class(-out) : out;
}

mpz_class pow10(unsigned e) {
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), 10, e);
  return out;
}

// Half-even quotient in arbitrary precision.
mpz_class div_even(const mpz_class& num, const mpz_class& den) {
  mpz_class q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  const int c = cmp(mpz_class(2 * abs(r)), abs(den));
  if (r != 0 && (c > 0 || (c == 0 && mpz_odd_p(q.get_mpz_t())))) q += 1;
  return q;
}

// Value of d scaled to 10^-9 units.
mpz_class nano(const Decimal& d) { return to_mpz(d.unscaled()) * pow10(static_cast<unsigned>(9 - d.scale())); }

Decimal random_decimal(std::mt19937_64& rng) {
  const std::int64_t unscaled = static_cast<std::int64_t>(rng() % 2000000001) - 1000000000;
  return Decimal::from_parts(unscaled, static_cast<int>(rng() % 10));
}

}  // namespace

TEST_CASE("hex round trip and rejection") {
  const Bytes b{0x00, 0x7f, 0xff, 0x10};
  CHECK(to_hex(b) == "007fff10");
  CHECK(from_hex("007fff10") == b);
  CHECK(from_hex("007FFF10") == b);
  CHECK_THROWS_AS(from_hex("abc"), Error);
  CHECK_THROWS_AS(from_hex("zz"), Error);
}

TEST_CASE("digest parsing is strict") {
  const std::string h(64, 'a');
  CHECK(Digest::from_hex(h).hex() == h);
  CHECK_THROWS_AS(Digest::from_hex(std::string(64, 'A')), Error);
  CHECK_THROWS_AS(Digest::from_hex(std::string(62, 'a')), Error);
  CHECK(Digest{}.is_zero());
}

TEST_CASE("big-endian appenders") {
  Bytes out;
  append_u8(out, 0xab);
  append_be32(out, 0x01020304);
  append_be64(out, 0x0102030405060708ULL);
  CHECK(to_hex(out) == "ab010203040102030405060708");
}

TEST_CASE("rfc3339 formatting") {
  CHECK(format_rfc3339(0) == "1970-01-01T00:00:00.000Z");
  CHECK(format_rfc3339(951782400123) == "2000-02-29T00:00:00.123Z");
  CHECK(parse_rfc3339("2000-02-29T00:00:00.123Z") == 951782400123);
  CHECK_THROWS_AS(parse_rfc3339("2000-02-29T00:00:00Z"), Error);
  CHECK_THROWS_AS(parse_rfc3339("2001-02-29T00:00:00.000Z"), Error);
  CHECK_THROWS_AS(parse_rfc3339("2000-02-29 00:00:00.000Z"), Error);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    const TimestampMs ts = static_cast<TimestampMs>(rng() % 4102444800000ULL);
    REQUIRE(parse_rfc3339(format_rfc3339(ts)) == ts);
  }
}

TEST_CASE("decimal parsing and rendering") {
  CHECK(Decimal::parse("99.90").to_string() == "99.9");
  CHECK(Decimal::parse("-0.50").to_string() == "-0.5");
  CHECK(Decimal::parse("-0").to_string() == "0");
  CHECK(Decimal::parse("0.000000001").to_string() == "0.000000001");
  CHECK(Decimal::parse("+7").to_string() == "7");
  CHECK(Decimal::parse("1.5") == Decimal::parse("1.500"));
  CHECK(Decimal::parse("2.5").to_string_fixed(0) == "2");
  CHECK(Decimal::parse("3.5").to_string_fixed(0) == "4");
  CHECK(Decimal::parse("-1.005").to_string_fixed(2) == "-1.00");
  CHECK(Decimal(7).to_string_fixed(2) == "7.00");
  for (const char* bad : {"", "-", ".5", "5.", "1e3", "1.2.3", "0.0000000001", " 1", "1,0"})
    CHECK_THROWS_AS(Decimal::parse(bad), Error);
}

TEST_CASE("decimal arithmetic examples") {
  CHECK(Decimal::parse("0.1") + Decimal::parse("0.2") == Decimal::parse("0.3"));
  CHECK(Decimal(1000) - Decimal(100) * (Decimal::parse("99.9") - Decimal::parse("99.4")) == Decimal(950));
  CHECK(Decimal::divide(Decimal(1), Decimal(8), 2) == Decimal::parse("0.12"));
  CHECK(Decimal::divide(Decimal(3), Decimal(8), 2) == Decimal::parse("0.38"));
  CHECK(Decimal::divide(Decimal(-3), Decimal(8), 2) == Decimal::parse("-0.38"));
  CHECK(Decimal::parse("0.000000001") * Decimal::parse("0.5") == Decimal(0));
  CHECK(Decimal::parse("0.000000003") * Decimal::parse("0.5") == Decimal::parse("0.000000002"));
  CHECK_THROWS_AS(Decimal::divide(Decimal(1), Decimal(0)), Error);
  const Decimal huge = Decimal::parse("100000000000000000000000000000");
  CHECK_THROWS_AS(huge * huge, Error);
  CHECK(Decimal::parse("-1") < Decimal::parse("-0.5"));
}

TEST_CASE("property: decimal arithmetic agrees with an arbitrary-precision model") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 20000; ++i) {
    const Decimal a = random_decimal(rng), b = random_decimal(rng);
    REQUIRE(nano(a + b) == nano(a) + nano(b));
    REQUIRE(nano(a - b) == nano(a) - nano(b));
    REQUIRE(nano(a * b) == div_even(nano(a) * nano(b), pow10(9)));
    REQUIRE(((a < b) == (nano(a) < nano(b))));
    if (!b.is_zero()) {
      const int scale = static_cast<int>(rng() % 10);
      const mpz_class q = div_even(nano(a) * pow10(static_cast<unsigned>(scale)), nano(b));
      REQUIRE(nano(Decimal::divide(a, b, scale)) == q * pow10(static_cast<unsigned>(9 - scale)));
    }
    const int places = static_cast<int>(rng() % 10);
    REQUIRE(nano(a.round(places)) ==
            div_even(nano(a), pow10(static_cast<unsigned>(9 - places))) * pow10(static_cast<unsigned>(9 - places)));
    REQUIRE(Decimal::parse(a.to_string()) == a);
  }
}

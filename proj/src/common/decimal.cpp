#include "ags/decimal.hpp"

#include <algorithm>

#include "ags/error.hpp"

namespace ags {

namespace {

using Int = Decimal::Int;

[[noreturn]] void overflow() { throw Error(ErrorCode::arithmetic, "decimal overflow"); }

Int pow10(int exp) {
  Int v = 1;
  for (int i = 0; i < exp; ++i) v *= 10;
  return v;
}

Int checked_mul(Int a, Int b) {
  Int out;
  if (__builtin_mul_overflow(a, b, &out)) overflow();
  return out;
}

Int checked_add(Int a, Int b) {
  Int out;
  if (__builtin_add_overflow(a, b, &out)) overflow();
  return out;
}

// num / den rounded half to even; den != 0.
Int div_half_even(Int num, Int den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Int q = num / den;
  Int r = num % den;
  if (r == 0) return q;
  const Int abs_r = r < 0 ? -r : r;
  const Int other = den - abs_r;  // compare |r| with den/2 without doubling
  const int dir = num < 0 ? -1 : 1;
  if (abs_r > other || (abs_r == other && (q % 2 != 0))) q += dir;
  return q;
}

std::string digits_of(Int v) {
  if (v == 0) return "0";
  std::string out;
  const bool neg = v < 0;
  while (v != 0) {
    const int digit = static_cast<int>(v % 10);
    out.push_back(static_cast<char>('0' + (neg ? -digit : digit)));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// Both operands brought to the larger scale.
void align(const Decimal& a, const Decimal& b, Int& ua, Int& ub, int& scale) {
  scale = std::max(a.scale(), b.scale());
  ua = checked_mul(a.unscaled(), pow10(scale - a.scale()));
  ub = checked_mul(b.unscaled(), pow10(scale - b.scale()));
}

}  // namespace

Decimal Decimal::from_parts(Int unscaled, int scale) {
  if (scale < 0 || scale > kMaxScale) throw Error(ErrorCode::invalid, "decimal scale must be in [0, 9]");
  while (scale > 0 && unscaled % 10 == 0) {
    unscaled /= 10;
    --scale;
  }
  if (unscaled == 0) scale = 0;
  Decimal d;
  d.unscaled_ = unscaled;
  d.scale_ = scale;
  return d;
}

Decimal Decimal::parse(std::string_view text) {
  std::size_t pos = 0;
  bool neg = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    neg = text[pos] == '-';
    ++pos;
  }
  Int value = 0;
  int int_digits = 0, frac_digits = 0;
  bool seen_point = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c == '.') {
      if (seen_point || int_digits == 0) throw Error(ErrorCode::invalid, "malformed decimal: " + std::string(text));
      seen_point = true;
      continue;
    }
    if (c < '0' || c > '9') throw Error(ErrorCode::invalid, "malformed decimal: " + std::string(text));
    value = checked_add(checked_mul(value, 10), c - '0');
    (seen_point ? frac_digits : int_digits)++;
  }
  if (int_digits == 0 || (seen_point && frac_digits == 0))
    throw Error(ErrorCode::invalid, "malformed decimal: " + std::string(text));
  if (frac_digits > kMaxScale) throw Error(ErrorCode::invalid, "decimal has more than 9 fractional digits");
  return from_parts(neg ? -value : value, frac_digits);
}

std::string Decimal::unscaled_digits() const {
  return digits_of(unscaled_ < 0 ? -unscaled_ : unscaled_);
}

std::string Decimal::to_string() const {
  std::string digits = unscaled_digits();
  if (scale_ > 0) {
    if (static_cast<int>(digits.size()) <= scale_) digits.insert(0, static_cast<std::size_t>(scale_) + 1 - digits.size(), '0');
    digits.insert(digits.size() - static_cast<std::size_t>(scale_), ".");
  }
  return negative() ? "-" + digits : digits;
}

std::string Decimal::to_string_fixed(int places) const {
  const Decimal r = round(places);
  std::string digits = r.unscaled_digits();
  digits.append(static_cast<std::size_t>(places - r.scale_), '0');
  if (places > 0) {
    if (static_cast<int>(digits.size()) <= places) digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(), '0');
    digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
  }
  return r.negative() ? "-" + digits : digits;
}

Decimal operator+(const Decimal& a, const Decimal& b) {
  Int ua, ub;
  int scale;
  align(a, b, ua, ub, scale);
  return Decimal::from_parts(checked_add(ua, ub), scale);
}

Decimal operator-(const Decimal& a, const Decimal& b) { return a + (-b); }

Decimal Decimal::operator-() const {
  Decimal d = *this;
  d.unscaled_ = -unscaled_;
  return d;
}

Decimal operator*(const Decimal& a, const Decimal& b) {
  Int product = checked_mul(a.unscaled(), b.unscaled());
  int scale = a.scale() + b.scale();
  if (scale > Decimal::kMaxScale) {
    product = div_half_even(product, pow10(scale - Decimal::kMaxScale));
    scale = Decimal::kMaxScale;
  }
  return Decimal::from_parts(product, scale);
}

Decimal Decimal::divide(const Decimal& a, const Decimal& b, int scale) {
  if (b.is_zero()) throw Error(ErrorCode::arithmetic, "division by zero");
  if (scale < 0 || scale > kMaxScale) throw Error(ErrorCode::invalid, "division scale must be in [0, 9]");
  // a/b = (ua/10^sa) / (ub/10^sb); result unscaled at `scale` places is
  // ua * 10^(scale + sb - sa) / ub, where the exponent may be negative.
  const int exp = scale + b.scale() - a.scale();
  Int num = a.unscaled();
  Int den = b.unscaled();
  if (exp >= 0) {
    num = checked_mul(num, pow10(exp));
  } else {
    den = checked_mul(den, pow10(-exp));
  }
  return from_parts(div_half_even(num, den), scale);
}

Decimal Decimal::round(int places) const {
  if (places < 0 || places > kMaxScale) throw Error(ErrorCode::invalid, "round places must be in [0, 9]");
  if (scale_ <= places) return *this;
  return from_parts(div_half_even(unscaled_, pow10(scale_ - places)), places);
}

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
  Int ua, ub;
  int scale;
  align(a, b, ua, ub, scale);
  return ua <=> ub;
}

}  // namespace ags

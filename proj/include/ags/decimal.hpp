#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace ags {

// Exact base-10 fixed-point number: unscaled * 10^-scale with scale <= 9.
// Values are always normalized (no trailing fractional zeros, zero has scale
// 0), so equal numbers have identical representations. Every operation that
// would exceed the 128-bit unscaled range throws Error(arithmetic).
class Decimal {
 public:
  __extension__ using Int = __int128;

  static constexpr int kMaxScale = 9;

  Decimal() = default;
  Decimal(std::int64_t integer) : unscaled_(integer) {}  // NOLINT: implicit by intent

  // From unscaled and scale; normalizes. Throws Error(invalid) for scale > 9.
  static Decimal from_parts(Int unscaled, int scale);

  // "[+-]digits[.digits]", at most 9 fractional digits. Throws Error(invalid).
  static Decimal parse(std::string_view text);

  Int unscaled() const { return unscaled_; }
  int scale() const { return scale_; }
  bool negative() const { return unscaled_ < 0; }
  bool is_zero() const { return unscaled_ == 0; }

  // Shortest exact rendering, e.g. "950", "-0.5", "99.9".
  std::string to_string() const;
  // Renders with exactly `places` fractional digits after half-even rounding.
  std::string to_string_fixed(int places) const;
  // Decimal digits of |unscaled|.
  std::string unscaled_digits() const;

  friend Decimal operator+(const Decimal& a, const Decimal& b);
  friend Decimal operator-(const Decimal& a, const Decimal& b);
  Decimal operator-() const;
  // Products finer than 9 places are rounded half-even to scale 9.
  friend Decimal operator*(const Decimal& a, const Decimal& b);

  // Quotient rounded half-even at `scale` places. Throws Error(arithmetic) on
  // a zero divisor.
  static Decimal divide(const Decimal& a, const Decimal& b, int scale = kMaxScale);

  // Half-even rounding to `places` fractional digits (0..9).
  Decimal round(int places) const;

  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b);
  friend bool operator==(const Decimal& a, const Decimal& b) = default;

 private:
  Int unscaled_ = 0;
  int scale_ = 0;
};

}  // namespace ags

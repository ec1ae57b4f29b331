#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ags {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView bytes);

// Lowercase or uppercase accepted; throws Error(invalid) on odd length or
// non-hex characters.
Bytes from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view text) {
  return {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()};
}

void append(Bytes& out, ByteView bytes);
void append(Bytes& out, std::string_view text);
void append_u8(Bytes& out, std::uint8_t value);
void append_be32(Bytes& out, std::uint32_t value);
void append_be64(Bytes& out, std::uint64_t value);

// 32-byte hash output.
class Digest {
 public:
  static constexpr std::size_t size = 32;

  Digest() = default;
  explicit Digest(const std::array<std::uint8_t, size>& bytes) : bytes_(bytes) {}

  // Throws Error(invalid) unless bytes.size() == 32.
  static Digest from_bytes(ByteView bytes);
  // Requires exactly 64 lowercase hex characters.
  static Digest from_hex(std::string_view hex);

  const std::array<std::uint8_t, size>& bytes() const { return bytes_; }
  std::array<std::uint8_t, size>& bytes() { return bytes_; }
  ByteView view() const { return bytes_; }
  std::string hex() const { return to_hex(bytes_); }
  bool is_zero() const;

  auto operator<=>(const Digest&) const = default;

 private:
  std::array<std::uint8_t, size> bytes_{};
};

}  // namespace ags

#include "ags/bytes.hpp"

#include <algorithm>

#include "ags/error.hpp"

namespace ags {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string to_hex(ByteView bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(ErrorCode::invalid, "hex string has odd length");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_value(hex[i]);
    int lo = hex_value(hex[i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::invalid, "invalid hex character");
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

void append(Bytes& out, ByteView bytes) { out.insert(out.end(), bytes.begin(), bytes.end()); }

void append(Bytes& out, std::string_view text) { append(out, as_bytes(text)); }

void append_u8(Bytes& out, std::uint8_t value) { out.push_back(value); }

void append_be32(Bytes& out, std::uint32_t value) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(value >> shift));
}

void append_be64(Bytes& out, std::uint64_t value) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(value >> shift));
}

Digest Digest::from_bytes(ByteView bytes) {
  if (bytes.size() != size) throw Error(ErrorCode::invalid, "digest must be exactly 32 bytes");
  Digest d;
  std::copy(bytes.begin(), bytes.end(), d.bytes_.begin());
  return d;
}

Digest Digest::from_hex(std::string_view hex) {
  if (hex.size() != 2 * size) throw Error(ErrorCode::invalid, "digest hex must be 64 characters");
  // Canonical form is lowercase; uppercase would break bit-exact re-serialization.
  if (std::any_of(hex.begin(), hex.end(), [](char c) { return c >= 'A' && c <= 'F'; }))
    throw Error(ErrorCode::invalid, "digest hex must be lowercase");
  return from_bytes(ags::from_hex(hex));
}

bool Digest::is_zero() const {
  return std::all_of(bytes_.begin(), bytes_.end(), [](std::uint8_t b) { return b == 0; });
}

}  // namespace ags

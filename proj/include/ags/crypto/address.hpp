#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "ags/bytes.hpp"
#include "ags/crypto/ecdsa.hpp"

namespace ags::crypto {

std::string base58_encode(ByteView bytes);
// Throws Error(invalid) on characters outside the Bitcoin alphabet.
Bytes base58_decode(std::string_view text);

// Appends the first four bytes of sha256d(data) and Base58-encodes.
std::string base58check_encode(ByteView data);
// Returns data without the checksum. Throws Error(invalid) on a bad
// character, a too-short input, or a checksum mismatch.
Bytes base58check_decode(std::string_view text);

// Base58Check text of version || ripemd160(sha256(0x04||x||y)).
class Address {
 public:
  Address() = default;

  // Validates the text: decodes to 21 bytes with a correct checksum.
  static Address parse(std::string_view text);

  const std::string& text() const { return text_; }
  std::uint8_t version() const;
  std::array<std::uint8_t, 20> payload() const;

  auto operator<=>(const Address&) const = default;

 private:
  explicit Address(std::string text) : text_(std::move(text)) {}
  friend Address derive_address(const PublicKey&, std::uint8_t);

  std::string text_;
};

Address derive_address(const PublicKey& pub, std::uint8_t version = 0x00);

}  // namespace ags::crypto

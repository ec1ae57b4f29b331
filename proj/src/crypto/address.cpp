#include "ags/crypto/address.hpp"

#include <algorithm>

#include "ags/crypto/hash.hpp"
#include "ags/error.hpp"

namespace ags::crypto {

namespace {

constexpr std::string_view kAlphabet = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

}  // namespace

std::string base58_encode(ByteView bytes) {
  const auto zeros = static_cast<std::size_t>(
      std::find_if(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b != 0; }) - bytes.begin());
  // Base-256 to base-58 by repeated long division on a little-endian digit buffer.
  std::vector<std::uint8_t> digits;
  for (std::size_t i = zeros; i < bytes.size(); ++i) {
    unsigned carry = bytes[i];
    for (auto& d : digits) {
      carry += static_cast<unsigned>(d) << 8;
      d = static_cast<std::uint8_t>(carry % 58);
      carry /= 58;
    }
    while (carry > 0) {
      digits.push_back(static_cast<std::uint8_t>(carry % 58));
      carry /= 58;
    }
  }
  std::string out(zeros, '1');
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) out.push_back(kAlphabet[*it]);
  return out;
}

Bytes base58_decode(std::string_view text) {
  const auto ones = static_cast<std::size_t>(
      std::find_if(text.begin(), text.end(), [](char c) { return c != '1'; }) - text.begin());
  std::vector<std::uint8_t> bytes;  // little-endian
  for (std::size_t i = ones; i < text.size(); ++i) {
    const auto pos = kAlphabet.find(text[i]);
    if (pos == std::string_view::npos) throw Error(ErrorCode::invalid, "invalid base58 character");
    unsigned carry = static_cast<unsigned>(pos);
    for (auto& b : bytes) {
      carry += static_cast<unsigned>(b) * 58;
      b = static_cast<std::uint8_t>(carry & 0xff);
      carry >>= 8;
    }
    while (carry > 0) {
      bytes.push_back(static_cast<std::uint8_t>(carry & 0xff));
      carry >>= 8;
    }
  }
  Bytes out(ones, 0);
  out.insert(out.end(), bytes.rbegin(), bytes.rend());
  return out;
}

std::string base58check_encode(ByteView data) {
  Bytes full(data.begin(), data.end());
  const Digest check = sha256d(data);
  full.insert(full.end(), check.bytes().begin(), check.bytes().begin() + 4);
  return base58_encode(full);
}

Bytes base58check_decode(std::string_view text) {
  Bytes full = base58_decode(text);
  if (full.size() < 4) throw Error(ErrorCode::invalid, "base58check payload too short");
  const ByteView body(full.data(), full.size() - 4);
  const Digest check = sha256d(body);
  if (!std::equal(check.bytes().begin(), check.bytes().begin() + 4, full.end() - 4))
    throw Error(ErrorCode::invalid, "base58check checksum mismatch");
  full.resize(full.size() - 4);
  return full;
}

Address Address::parse(std::string_view text) {
  const Bytes decoded = base58check_decode(text);
  if (decoded.size() != 21) throw Error(ErrorCode::invalid, "address must decode to version + 20 bytes");
  // Reject non-canonical spellings so that text equality means address equality.
  if (base58check_encode(decoded) != text) throw Error(ErrorCode::invalid, "address is not canonical");
  return Address(std::string(text));
}

std::uint8_t Address::version() const { return base58check_decode(text_).at(0); }

std::array<std::uint8_t, 20> Address::payload() const {
  const Bytes decoded = base58check_decode(text_);
  std::array<std::uint8_t, 20> out;
  std::copy(decoded.begin() + 1, decoded.end(), out.begin());
  return out;
}

Address derive_address(const PublicKey& pub, std::uint8_t version) {
  const Digest inner = sha256(pub.serialize());
  const Ripemd160Digest payload = ripemd160(inner.view());
  Bytes data{version};
  append(data, payload);
  return Address(base58check_encode(data));
}

}  // namespace ags::crypto

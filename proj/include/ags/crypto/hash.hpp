#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "ags/bytes.hpp"

namespace ags::crypto {

// FIPS 180-4 SHA-256, streaming.
class Sha256 {
 public:
  Sha256();
  Sha256& update(ByteView data);
  Sha256& update(std::string_view text) { return update(as_bytes(text)); }
  Digest finalize();

 private:
  void compress(const std::uint8_t* block);

  std::array<std::uint32_t, 8> state_;
  std::array<std::uint8_t, 64> buffer_{};
  std::size_t buffered_ = 0;
  std::uint64_t total_bytes_ = 0;
};

Digest sha256(ByteView data);
inline Digest sha256(std::string_view text) { return sha256(as_bytes(text)); }

// SHA-256 applied twice; used for Base58Check checksums.
Digest sha256d(ByteView data);

using Ripemd160Digest = std::array<std::uint8_t, 20>;

// RIPEMD-160 (Dobbertin, Bosselaers, Preneel 1996).
Ripemd160Digest ripemd160(ByteView data);
inline Ripemd160Digest ripemd160(std::string_view text) { return ripemd160(as_bytes(text)); }

// RFC 2104 HMAC over SHA-256.
Digest hmac_sha256(ByteView key, ByteView message);

}  // namespace ags::crypto

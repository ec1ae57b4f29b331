#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ags/bytes.hpp"
#include "ags/crypto/address.hpp"
#include "ags/decimal.hpp"

namespace ags::codec {

// The operational state for one contract period.
struct MeasurementReport {
  Digest contract_id;
  std::string period_id;
  std::uint32_t version = 1;
  crypto::Address author;
  std::map<std::string, Decimal> metrics;  // std::map keeps names in byte order
  std::string notes;
  std::vector<Digest> attachment_digests;

  friend bool operator==(const MeasurementReport&, const MeasurementReport&) = default;
};

// Field tags of the canonical layout, in encoding order.
enum class ReportField : std::uint8_t {
  contract_id = 0x01,
  period_id = 0x02,
  version = 0x03,
  author = 0x04,
  metrics = 0x05,
  notes = 0x06,
  attachments = 0x07,
};

// Metric names follow [A-Za-z_][A-Za-z0-9_]*.
bool is_identifier(std::string_view name);

// Throws Error(invalid) naming the first violated invariant.
void validate(const MeasurementReport& report);

// Each field is tag(1) || length(4, big-endian) || value, in ReportField
// order. Values:
//   contract_id  32 raw bytes
//   period_id    UTF-8
//   version      4-byte big-endian
//   author       Base58Check text
//   metrics      count(4) then per metric: name length(4) || name || decimal
//   notes        UTF-8
//   attachments  count(4) then 32 bytes per digest, in list order
// A decimal is sign(1: 0x00 or 0x01) || digit count(4) || ASCII digits of
// |unscaled| || scale(1), after normalization.
Bytes canonical_bytes(const MeasurementReport& report);

Digest report_digest(const MeasurementReport& report);

void append_decimal(Bytes& out, const Decimal& value);

// JSON interchange: same field names; metric values are decimal strings
// (integers are also accepted on input).
nlohmann::json to_json(const MeasurementReport& report);
MeasurementReport report_from_json(const nlohmann::json& json);

Decimal decimal_from_json(const nlohmann::json& value);

// Compact JSON with sorted keys. Floating-point numbers are rejected so the
// text is reproducible across implementations. Throws Error(invalid).
std::string canonical_json(const nlohmann::json& value);

}  // namespace ags::codec

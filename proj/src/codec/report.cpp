#include "ags/codec/report.hpp"

#include "ags/crypto/hash.hpp"
#include "ags/error.hpp"

namespace ags::codec {

namespace {

void put_field(Bytes& out, ReportField tag, ByteView value) {
  append_u8(out, static_cast<std::uint8_t>(tag));
  append_be32(out, static_cast<std::uint32_t>(value.size()));
  append(out, value);
}

void reject_floats(const nlohmann::json& value) {
  if (value.is_number_float()) throw Error(ErrorCode::invalid, "floating-point numbers are not allowed");
  if (value.is_structured()) {
    for (const auto& item : value) reject_floats(item);
  }
}

}  // namespace

bool is_identifier(std::string_view name) {
  if (name.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!alpha(name.front())) return false;
  for (char c : name) {
    if (!alpha(c) && !(c >= '0' && c <= '9')) return false;
  }
  return true;
}

void validate(const MeasurementReport& report) {
  if (report.version < 1) throw Error(ErrorCode::invalid, "report version must be >= 1");
  if (report.period_id.empty()) throw Error(ErrorCode::invalid, "report period_id must be nonempty");
  if (report.author.text().empty()) throw Error(ErrorCode::invalid, "report author is missing");
  for (const auto& [name, value] : report.metrics) {
    if (!is_identifier(name)) throw Error(ErrorCode::invalid, "metric name is not an identifier: " + name);
    if (value.scale() > Decimal::kMaxScale) throw Error(ErrorCode::invalid, "metric scale exceeds 9");
  }
}

void append_decimal(Bytes& out, const Decimal& value) {
  const std::string digits = value.unscaled_digits();
  append_u8(out, value.negative() ? 0x01 : 0x00);
  append_be32(out, static_cast<std::uint32_t>(digits.size()));
  append(out, digits);
  append_u8(out, static_cast<std::uint8_t>(value.scale()));
}

Bytes canonical_bytes(const MeasurementReport& report) {
  validate(report);
  Bytes out;
  put_field(out, ReportField::contract_id, report.contract_id.view());
  put_field(out, ReportField::period_id, as_bytes(report.period_id));
  Bytes version;
  append_be32(version, report.version);
  put_field(out, ReportField::version, version);
  put_field(out, ReportField::author, as_bytes(report.author.text()));

  Bytes metrics;
  append_be32(metrics, static_cast<std::uint32_t>(report.metrics.size()));
  for (const auto& [name, value] : report.metrics) {
    append_be32(metrics, static_cast<std::uint32_t>(name.size()));
    append(metrics, name);
    append_decimal(metrics, value);
  }
  put_field(out, ReportField::metrics, metrics);

  put_field(out, ReportField::notes, as_bytes(report.notes));

  Bytes attachments;
  append_be32(attachments, static_cast<std::uint32_t>(report.attachment_digests.size()));
  for (const Digest& d : report.attachment_digests) append(attachments, d.view());
  put_field(out, ReportField::attachments, attachments);
  return out;
}

Digest report_digest(const MeasurementReport& report) { return crypto::sha256(canonical_bytes(report)); }

nlohmann::json to_json(const MeasurementReport& report) {
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [name, value] : report.metrics) metrics[name] = value.to_string();
  nlohmann::json attachments = nlohmann::json::array();
  for (const Digest& d : report.attachment_digests) attachments.push_back(d.hex());
  return {{"contract_id", report.contract_id.hex()},
          {"period_id", report.period_id},
          {"version", report.version},
          {"author", report.author.text()},
          {"metrics", metrics},
          {"notes", report.notes},
          {"attachment_digests", attachments}};
}

Decimal decimal_from_json(const nlohmann::json& value) {
  if (value.is_string()) return Decimal::parse(value.get<std::string>());
  if (value.is_number_integer()) return Decimal(value.get<std::int64_t>());
  throw Error(ErrorCode::invalid, "decimal must be a string or an integer");
}

MeasurementReport report_from_json(const nlohmann::json& json) {
  if (!json.is_object()) throw Error(ErrorCode::invalid, "report must be a JSON object");
  try {
    MeasurementReport report;
    report.contract_id = Digest::from_hex(json.at("contract_id").get<std::string>());
    report.period_id = json.at("period_id").get<std::string>();
    const auto version = json.at("version").get<std::int64_t>();
    if (version < 1 || version > UINT32_MAX) throw Error(ErrorCode::invalid, "report version out of range");
    report.version = static_cast<std::uint32_t>(version);
    report.author = crypto::Address::parse(json.at("author").get<std::string>());
    if (json.contains("metrics")) {
      const auto& metrics = json.at("metrics");
      if (!metrics.is_object()) throw Error(ErrorCode::invalid, "metrics must be an object");
      for (const auto& [name, value] : metrics.items()) report.metrics.emplace(name, decimal_from_json(value));
    }
    if (json.contains("notes")) report.notes = json.at("notes").get<std::string>();
    if (json.contains("attachment_digests")) {
      for (const auto& d : json.at("attachment_digests")) report.attachment_digests.push_back(Digest::from_hex(d.get<std::string>()));
    }
    validate(report);
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid, std::string("malformed report: ") + e.what());
  }
}

std::string canonical_json(const nlohmann::json& value) {
  reject_floats(value);
  return value.dump();
}

}  // namespace ags::codec

#include "ags/ledger/chain.hpp"

#include <json.hpp>

#include "ags/crypto/hash.hpp"
#include "ags/error.hpp"

namespace ags::ledger {

using nlohmann::json;

std::string_view to_string(AnchorKind kind) {
  switch (kind) {
    case AnchorKind::report: return "report";
    case AnchorKind::event: return "event";
    case AnchorKind::certificate: return "certificate";
    case AnchorKind::policy: return "policy";
    case AnchorKind::payable: return "payable";
    case AnchorKind::envelope: return "envelope";
  }
  return "unknown";
}

AnchorKind anchor_kind_from_string(std::string_view text) {
  if (text == "report") return AnchorKind::report;
  if (text == "event") return AnchorKind::event;
  if (text == "certificate") return AnchorKind::certificate;
  if (text == "policy") return AnchorKind::policy;
  if (text == "payable") return AnchorKind::payable;
  if (text == "envelope") return AnchorKind::envelope;
  throw Error(ErrorCode::invalid, "unknown anchor kind: " + std::string(text));
}

Digest compute_block_digest(std::uint64_t height, const Digest& prev, TimestampMs timestamp,
                            std::span<const AnchorEntry> entries) {
  Bytes buf;
  append_be64(buf, height);
  append(buf, prev.view());
  append_be64(buf, static_cast<std::uint64_t>(timestamp));
  append_be32(buf, static_cast<std::uint32_t>(entries.size()));
  for (const AnchorEntry& e : entries) {
    append_u8(buf, static_cast<std::uint8_t>(e.kind));
    append(buf, e.digest.view());
    append_be32(buf, static_cast<std::uint32_t>(e.ref.size()));
    append(buf, e.ref);
  }
  return crypto::sha256(buf);
}

std::string block_to_json_line(const AnchorBlock& block) {
  json entries = json::array();
  for (const AnchorEntry& e : block.entries) {
    entries.push_back({{"kind", to_string(e.kind)}, {"digest", e.digest.hex()}, {"ref", e.ref}});
  }
  const json j = {{"height", block.height},
                  {"prev", block.prev_digest.hex()},
                  {"timestamp", format_rfc3339(block.timestamp)},
                  {"entries", entries},
                  {"digest", block.block_digest.hex()}};
  return j.dump();
}

AnchorBlock block_from_json_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::corrupt, std::string("block is not valid JSON: ") + e.what());
  }
  AnchorBlock block;
  try {
    if (!j.is_object() || j.size() != 5) throw Error(ErrorCode::corrupt, "block must have exactly 5 fields");
    block.height = j.at("height").get<std::uint64_t>();
    block.prev_digest = Digest::from_hex(j.at("prev").get<std::string>());
    block.timestamp = parse_rfc3339(j.at("timestamp").get<std::string>());
    for (const auto& e : j.at("entries")) {
      if (!e.is_object() || e.size() != 3) throw Error(ErrorCode::corrupt, "entry must have exactly 3 fields");
      block.entries.push_back({anchor_kind_from_string(e.at("kind").get<std::string>()),
                               Digest::from_hex(e.at("digest").get<std::string>()), e.at("ref").get<std::string>()});
    }
    block.block_digest = Digest::from_hex(j.at("digest").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::corrupt, std::string("block fields malformed: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::corrupt, e.what());
  }
  if (block_to_json_line(block) != line) throw Error(ErrorCode::corrupt, "block line is not in canonical form");
  return block;
}

namespace {

// Checks block `b` as the successor of a chain whose tip is (prev, last_ts).
std::optional<std::string> check_block(const AnchorBlock& b, std::uint64_t index, const Digest& prev,
                                       TimestampMs last_ts) {
  if (b.height != index) return "height is not consecutive";
  if (b.prev_digest != prev) return "prev_digest does not match predecessor";
  if (b.entries.empty()) return "block has no entries";
  if (index > 0 && b.timestamp < last_ts) return "timestamp earlier than predecessor";
  if (compute_block_digest(b.height, b.prev_digest, b.timestamp, b.entries) != b.block_digest)
    return "block_digest does not match contents";
  return std::nullopt;
}

}  // namespace

ChainVerdict verify_chain(std::span<const AnchorBlock> blocks) {
  Digest prev;
  TimestampMs last_ts = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (auto reason = check_block(blocks[i], i, prev, last_ts)) return {false, i, std::move(*reason)};
    prev = blocks[i].block_digest;
    last_ts = blocks[i].timestamp;
  }
  return {};
}

ChainVerdict verify_chain_jsonl(std::string_view text) {
  Digest prev;
  TimestampMs last_ts = 0;
  std::uint64_t height = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) return {false, height, "block line lacks a terminating newline"};
    AnchorBlock block;
    try {
      block = block_from_json_line(text.substr(pos, nl - pos));
    } catch (const Error& e) {
      return {false, height, e.what()};
    }
    if (auto reason = check_block(block, height, prev, last_ts)) return {false, height, std::move(*reason)};
    prev = block.block_digest;
    last_ts = block.timestamp;
    ++height;
    pos = nl + 1;
  }
  return {};
}

const AnchorBlock& AnchorChain::append_block(std::vector<AnchorEntry> entries, TimestampMs now) {
  if (entries.empty()) throw Error(ErrorCode::invalid, "anchor block needs at least one entry");
  AnchorBlock block;
  block.height = blocks_.size();
  block.prev_digest = tip_digest();
  block.timestamp = blocks_.empty() ? now : std::max(now, blocks_.back().timestamp);
  block.entries = std::move(entries);
  block.block_digest = compute_block_digest(block.height, block.prev_digest, block.timestamp, block.entries);
  blocks_.push_back(std::move(block));
  return blocks_.back();
}

std::vector<EntryPosition> AnchorChain::find_entry(const Digest& digest) const {
  std::vector<EntryPosition> out;
  for (const AnchorBlock& b : blocks_) {
    for (std::size_t i = 0; i < b.entries.size(); ++i) {
      if (b.entries[i].digest == digest) out.push_back({b.height, i});
    }
  }
  return out;
}

std::string AnchorChain::to_jsonl() const {
  std::string out;
  for (const AnchorBlock& b : blocks_) {
    out += block_to_json_line(b);
    out += '\n';
  }
  return out;
}

AnchorChain AnchorChain::from_jsonl(std::string_view text) {
  const ChainVerdict v = verify_chain_jsonl(text);
  if (!v.ok) {
    throw Error(ErrorCode::corrupt,
                "anchor chain invalid at height " + std::to_string(*v.first_invalid_height) + ": " + v.reason);
  }
  AnchorChain chain;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    chain.blocks_.push_back(block_from_json_line(text.substr(pos, nl - pos)));
    pos = nl + 1;
  }
  return chain;
}

}  // namespace ags::ledger

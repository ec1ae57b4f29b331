#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ags/bytes.hpp"
#include "ags/timeutil.hpp"

namespace ags::ledger {

enum class AnchorKind : std::uint8_t { report = 1, event = 2, certificate = 3, policy = 4, payable = 5, envelope = 6 };

std::string_view to_string(AnchorKind kind);
AnchorKind anchor_kind_from_string(std::string_view text);

struct AnchorEntry {
  AnchorKind kind;
  Digest digest;
  std::string ref;  // free-form locator, e.g. "report:<pid>:v2"

  friend bool operator==(const AnchorEntry&, const AnchorEntry&) = default;
};

struct AnchorBlock {
  std::uint64_t height = 0;
  Digest prev_digest;
  TimestampMs timestamp = 0;
  std::vector<AnchorEntry> entries;
  Digest block_digest;

  friend bool operator==(const AnchorBlock&, const AnchorBlock&) = default;
};

// sha256(height(8) || prev(32) || timestamp ms(8) || count(4) ||
//        per entry: kind(1) || digest(32) || ref length(4) || ref)
Digest compute_block_digest(std::uint64_t height, const Digest& prev, TimestampMs timestamp,
                            std::span<const AnchorEntry> entries);

// One JSON object per block; keys sorted, no whitespace, digests lowercase hex,
// timestamp RFC 3339. Parsing is strict: the line must re-serialize to the
// same bytes.
std::string block_to_json_line(const AnchorBlock& block);
AnchorBlock block_from_json_line(std::string_view line);

struct ChainVerdict {
  bool ok = true;
  std::optional<std::uint64_t> first_invalid_height;
  std::string reason;
};

ChainVerdict verify_chain(std::span<const AnchorBlock> blocks);

// Verifies a JSON Lines rendering. Each block owns its line including the
// trailing newline; any defect in those bytes is reported at that height.
ChainVerdict verify_chain_jsonl(std::string_view text);

struct EntryPosition {
  std::uint64_t height;
  std::size_t index;

  friend bool operator==(const EntryPosition&, const EntryPosition&) = default;
};

// Append-only chain. Single writer; the object itself is not synchronized.
class AnchorChain {
 public:
  AnchorChain() = default;

  // Appends one block. The timestamp is clamped to be no earlier than the
  // previous block's. Throws Error(invalid) on an empty entry list.
  const AnchorBlock& append_block(std::vector<AnchorEntry> entries, TimestampMs now);

  std::vector<EntryPosition> find_entry(const Digest& digest) const;

  const std::vector<AnchorBlock>& blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  bool empty() const { return blocks_.empty(); }
  const AnchorBlock& tip() const { return blocks_.back(); }
  Digest tip_digest() const { return blocks_.empty() ? Digest{} : blocks_.back().block_digest; }

  std::string to_jsonl() const;
  // Verifies before accepting; throws Error(corrupt) naming the first bad height.
  static AnchorChain from_jsonl(std::string_view text);

 private:
  std::vector<AnchorBlock> blocks_;
};

}  // namespace ags::ledger

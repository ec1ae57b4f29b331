#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ags/bytes.hpp"
#include "ags/consensus/engine.hpp"
#include "ags/crypto/address.hpp"
#include "ags/crypto/ecdsa.hpp"
#include "ags/timeutil.hpp"

namespace ags::service {

// A client request to mutate state. `sig` is the actor's signature over
// sha256(payload_digest || nonce as 8 bytes big-endian), where
// payload_digest = sha256(action || 0x00 || canonical JSON of payload).
struct Envelope {
  std::string action;  // open_contract, propose, observe, vote, resubmit
  crypto::Address actor;
  std::string pubkey;  // hex, 0x04 || x || y
  std::uint64_t nonce = 0;
  nlohmann::json payload;
  std::string sig;  // hex, r || s

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

Digest envelope_payload_digest(std::string_view action, const nlohmann::json& payload);
Digest envelope_signing_digest(const Digest& payload_digest, std::uint64_t nonce);

nlohmann::json to_json(const Envelope& env);
// Throws Error(invalid) on missing or mistyped fields.
Envelope envelope_from_json(const nlohmann::json& j);

// Client side: fills actor, pubkey and sig.
Envelope sign_envelope(const crypto::PrivateKey& key, std::string action, nlohmann::json payload, std::uint64_t nonce);

// Throws Error(authentication) unless the key hashes to the actor and the
// signature verifies.
void verify_envelope(const Envelope& env, const crypto::CurveParams& curve);

// One line of the store: the envelope plus server-assigned fields, hash
// chained through `prev`. `digest` = sha256 of the canonical JSON of the
// record without the digest field.
struct StoreRecord {
  std::uint64_t seq = 0;
  TimestampMs ts = 0;
  Envelope envelope;
  Digest payload_digest;
  Digest prev;
  Digest digest;

  friend bool operator==(const StoreRecord&, const StoreRecord&) = default;
};

Digest compute_record_digest(const StoreRecord& record);
// Canonical JSON, no trailing newline.
std::string record_to_line(const StoreRecord& record);
// Strict: the line must re-serialize to identical bytes. Throws Error(corrupt).
StoreRecord record_from_line(std::string_view line);

// Consensus engine plus the per-actor nonces and store hash chain.
// apply() is all-or-nothing and is the single code path for live requests
// and replay.
class State {
 public:
  explicit State(const crypto::CurveParams& curve) : curve_(&curve) {}

  // Checks seq, prev, digest, payload digest, envelope signature and nonce,
  // then performs the action. Returns the response entity.
  nlohmann::json apply(const StoreRecord& record);

  const consensus::Engine& engine() const { return engine_; }
  const crypto::CurveParams& curve() const { return *curve_; }
  std::uint64_t height() const { return height_; }
  const Digest& last_digest() const { return last_digest_; }
  TimestampMs last_ts() const { return last_ts_; }
  std::uint64_t last_nonce(const crypto::Address& actor) const;

  // Canonical JSON of engine state, nonces, and store head.
  std::string canonical() const;

 private:
  nlohmann::json dispatch(const StoreRecord& record);

  const crypto::CurveParams* curve_;
  consensus::Engine engine_;
  std::map<crypto::Address, std::uint64_t> nonces_;
  std::uint64_t height_ = 0;
  Digest last_digest_;
  TimestampMs last_ts_ = 0;
};

struct ReplayOutcome {
  State state;
  bool ok = true;
  std::optional<std::uint64_t> first_bad_seq;
  std::string reason;
  std::size_t valid_bytes = 0;  // length of the accepted prefix
  bool torn_tail = false;       // a trailing partial line was dropped
};

// Replays store text. In strict mode every line, including the last, must
// end in a newline. Otherwise a final unterminated line that does not
// parse as a record is treated as an interrupted write and dropped.
ReplayOutcome replay_store(std::string_view text, const crypto::CurveParams& curve, bool strict);

}  // namespace ags::service

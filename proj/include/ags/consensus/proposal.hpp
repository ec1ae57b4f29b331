#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ags/bytes.hpp"
#include "ags/codec/report.hpp"
#include "ags/consensus/policy.hpp"
#include "ags/crypto/ecdsa.hpp"
#include "ags/ledger/chain.hpp"
#include "ags/slalang/evaluator.hpp"
#include "ags/timeutil.hpp"

namespace ags::consensus {

enum class Decision : std::uint8_t { reject = 0x00, approve = 0x01 };

std::string_view to_string(Decision d);
Decision decision_from_string(std::string_view text);

// contract_id(32) || period_id || version(4, big-endian) || decision(1) || report digest(32)
Bytes vote_bytes(const Digest& contract_id, std::string_view period_id, std::uint32_t version, Decision decision,
                 const Digest& report_digest);
// The value a voter signs: sha256(vote_bytes).
Digest vote_digest(const Digest& contract_id, std::string_view period_id, std::uint32_t version, Decision decision,
                   const Digest& report_digest);

// contract_id(32) || period length(4) || period_id || version(4) || text
Bytes observation_bytes(const Digest& contract_id, std::string_view period_id, std::uint32_t version,
                        std::string_view text);
Digest observation_digest(const Digest& contract_id, std::string_view period_id, std::uint32_t version,
                          std::string_view text);

// sha256(contract_id || period_id)
Digest proposal_id(const Digest& contract_id, std::string_view period_id);

enum class EventKind : std::uint8_t {
  contract_opened = 1,
  proposed,
  observed,
  voted,
  rejected,
  resubmitted,
  finalized,
  finalize_failed,
};

std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view text);

// `signature` is the actor's signature over `payload_digest`: the report
// digest for proposed/resubmitted, the observation digest, or the vote
// digest. Decisions derived from a vote (rejected, finalized, finalize_failed)
// carry the deciding vote's digest and signature. Action payloads are kept
// so that a timeline alone suffices for replay.
struct TimelineEvent {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::proposed;
  crypto::Address actor;
  std::uint32_t version = 0;
  Digest payload_digest;
  crypto::Signature signature;
  TimestampMs timestamp = 0;
  std::optional<codec::MeasurementReport> report;
  std::optional<Decision> decision;
  std::string text;  // observation text, or the failure message

  friend bool operator==(const TimelineEvent&, const TimelineEvent&) = default;
};

nlohmann::json to_json(const TimelineEvent& event, const crypto::CurveParams& curve);
TimelineEvent event_from_json(const nlohmann::json& j, const crypto::CurveParams& curve);
Digest event_digest(const TimelineEvent& event, const crypto::CurveParams& curve);
// sha256 over the concatenated event digests, in order.
Digest timeline_digest(std::span<const TimelineEvent> events, const crypto::CurveParams& curve);

enum class ProposalState { pending_review, rejected, finalized };
std::string_view to_string(ProposalState state);

struct ReportVersion {
  codec::MeasurementReport report;
  Digest digest;
  std::string anchor_ref;
  crypto::Signature signature;

  friend bool operator==(const ReportVersion&, const ReportVersion&) = default;
};

struct Vote {
  crypto::Address voter;
  std::uint32_t version = 0;
  Decision decision = Decision::approve;
  crypto::Signature signature;
  TimestampMs timestamp = 0;

  friend bool operator==(const Vote&, const Vote&) = default;
};

struct Observation {
  crypto::Address author;
  std::uint32_t version = 0;
  std::string text;
  crypto::Signature signature;
  TimestampMs timestamp = 0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct CertificateVote {
  crypto::Address voter;
  Decision decision = Decision::approve;
  crypto::Signature signature;

  friend bool operator==(const CertificateVote&, const CertificateVote&) = default;
};

// Self-contained: carries the policy, program and final report so that every
// claim can be rechecked from the certificate plus the anchor chain.
struct Certificate {
  Digest contract_id;
  std::string period_id;
  std::uint32_t final_version = 0;
  Digest report_digest;
  GovernancePolicy policy;
  std::string program_source;
  codec::MeasurementReport report;
  sla::PayableStatement payable;
  Digest payable_digest;
  std::vector<CertificateVote> votes;
  Digest timeline_digest;
  std::string anchor_ref;

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

nlohmann::json to_json(const Certificate& cert);
Certificate certificate_from_json(const nlohmann::json& j);
Digest certificate_digest(const Certificate& cert);

struct CertificateVerdict {
  bool ok = true;
  std::string reason;  // policy, contract, signature, threshold, report, payable, anchor
  std::string detail;
};

// Accepts iff the policy and contract id are consistent, every vote
// signature verifies, approving weight reaches the threshold, the report
// and payable recompute, and the report and certificate digests are in a
// valid chain.
CertificateVerdict verify_certificate(const Certificate& cert, std::span<const ledger::AnchorBlock> chain);

struct Proposal {
  Digest id;
  Digest contract_id;
  std::string period_id;
  ProposalState state = ProposalState::pending_review;
  std::vector<ReportVersion> versions;  // versions[i] is version i + 1
  std::vector<Vote> votes;
  std::vector<Observation> observations;
  std::vector<TimelineEvent> timeline;
  std::optional<Certificate> certificate;
  bool finalize_failed = false;  // for the current version

  std::uint32_t current_version() const { return static_cast<std::uint32_t>(versions.size()); }
  const ReportVersion& current() const { return versions.back(); }

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

nlohmann::json to_json(const Proposal& proposal, const crypto::CurveParams& curve);

}  // namespace ags::consensus

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ags/codec/report.hpp"
#include "ags/consensus/policy.hpp"
#include "ags/consensus/proposal.hpp"
#include "ags/ledger/chain.hpp"
#include "ags/slalang/program.hpp"

namespace ags::consensus {

struct Contract {
  Digest id;
  GovernancePolicy policy;
  std::string program_source;
  sla::Program program;
  TimestampMs opened_at = 0;
  std::map<std::string, Digest> proposals;  // period_id -> proposal id
};

nlohmann::json to_json(const Contract& contract);

// The propose/observe/vote/resubmit state machine over all contracts, plus
// the anchor chain it writes to. Every mutating call validates completely
// before changing anything, so a throwing call leaves the engine untouched.
// Each successful mutation appends exactly one anchor block; callers may
// contribute extra entries to that block.
//
// Errors: not_found (unknown contract or proposal), invalid (malformed
// input), authorization (actor not in policy or not a proposer),
// authentication (signature does not verify), conflict (duplicate, stale
// version, double vote, wrong state).
class Engine {
 public:
  using Extra = std::vector<ledger::AnchorEntry>;

  Digest open_contract(const GovernancePolicy& policy, std::string_view program_source, TimestampMs now, Extra extra = {});

  // The proposer is report.author; `signature` is over the report digest.
  const Proposal& propose(const Digest& contract_id, const codec::MeasurementReport& report,
                          const crypto::Signature& signature, TimestampMs now, Extra extra = {});

  // Allowed when the proposal is rejected or the current version failed to
  // finalize. report.version must be current + 1.
  const Proposal& resubmit(const Digest& proposal_id, const codec::MeasurementReport& report,
                           const crypto::Signature& signature, TimestampMs now, Extra extra = {});

  // `signature` is over observation_digest(...) for the current version.
  const TimelineEvent& observe(const Digest& proposal_id, const crypto::Address& author, std::uint32_t version,
                               std::string text, const crypto::Signature& signature, TimestampMs now, Extra extra = {});

  // `signature` is over vote_digest(...) for `version`, which must be current.
  const Proposal& cast_vote(const Digest& proposal_id, const crypto::Address& voter, std::uint32_t version,
                            Decision decision, const crypto::Signature& signature, TimestampMs now, Extra extra = {});

  const Contract* find_contract(const Digest& contract_id) const;
  const Proposal* find_proposal(const Digest& proposal_id) const;
  const Proposal* find_proposal(const Digest& contract_id, std::string_view period_id) const;

  // Throws not_found for an unknown contract; empty for an unused period.
  std::vector<TimelineEvent> timeline(const Digest& contract_id, std::string_view period_id) const;

  const std::map<Digest, Contract>& contracts() const { return contracts_; }
  const std::map<Digest, Proposal>& proposals() const { return proposals_; }
  const ledger::AnchorChain& chain() const { return chain_; }

  // Canonical JSON of all contracts, proposals and the chain tip.
  std::string canonical_state() const;

 private:
  const Contract& contract_or_throw(const Digest& id) const;
  const Proposal& proposal_or_throw(const Digest& id) const;
  TimestampMs stamp(TimestampMs now) const;
  void commit(Proposal next, std::vector<ledger::AnchorEntry> entries, TimestampMs ts);

  std::map<Digest, Contract> contracts_;
  std::map<Digest, Proposal> proposals_;
  ledger::AnchorChain chain_;
  TimestampMs clock_ = 0;
};

// Rebuilds a proposal by feeding the action events of `events` into a fresh
// engine holding only `contract`. Throws Error(corrupt) if the regenerated
// timeline differs from `events` in any way.
Proposal replay_timeline(const Contract& contract, std::span<const TimelineEvent> events);

}  // namespace ags::consensus

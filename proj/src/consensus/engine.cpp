#include "ags/consensus/engine.hpp"

#include <algorithm>

#include "ags/crypto/hash.hpp"
#include "ags/error.hpp"

namespace ags::consensus {

using ledger::AnchorEntry;
using ledger::AnchorKind;
using nlohmann::json;

namespace {

const Participant& participant_or_throw(const GovernancePolicy& policy, const crypto::Address& who) {
  const Participant* p = policy.find(who);
  if (!p) throw Error(ErrorCode::authorization, who.text() + " is not a participant");
  return *p;
}

void check_signature(const Participant& p, const Digest& z, const crypto::Signature& sig) {
  if (!crypto::verify(p.pubkey, z, sig)) throw Error(ErrorCode::authentication, "signature does not verify for " + p.address.text());
}

std::string ref(std::string_view kind, const Digest& id, const std::string& suffix = {}) {
  std::string out(kind);
  out += ':';
  out += id.hex();
  if (!suffix.empty()) out += ":" + suffix;
  return out;
}

}  // namespace

json to_json(const Contract& c) {
  json periods = json::object();
  for (const auto& [period, pid] : c.proposals) periods[period] = pid.hex();
  return {{"id", c.id.hex()},
          {"policy", to_json(c.policy)},
          {"program", c.program_source},
          {"program_digest", c.program.source_digest.hex()},
          {"opened_at", format_rfc3339(c.opened_at)},
          {"proposals", periods}};
}

TimestampMs Engine::stamp(TimestampMs now) const { return std::max(now, clock_); }

const Contract& Engine::contract_or_throw(const Digest& id) const {
  auto it = contracts_.find(id);
  if (it == contracts_.end()) throw Error(ErrorCode::not_found, "unknown contract " + id.hex());
  return it->second;
}

const Proposal& Engine::proposal_or_throw(const Digest& id) const {
  auto it = proposals_.find(id);
  if (it == proposals_.end()) throw Error(ErrorCode::not_found, "unknown proposal " + id.hex());
  return it->second;
}

const Contract* Engine::find_contract(const Digest& id) const {
  auto it = contracts_.find(id);
  return it == contracts_.end() ? nullptr : &it->second;
}

const Proposal* Engine::find_proposal(const Digest& id) const {
  auto it = proposals_.find(id);
  return it == proposals_.end() ? nullptr : &it->second;
}

const Proposal* Engine::find_proposal(const Digest& contract_id, std::string_view period_id) const {
  return find_proposal(proposal_id(contract_id, period_id));
}

std::vector<TimelineEvent> Engine::timeline(const Digest& contract_id, std::string_view period_id) const {
  contract_or_throw(contract_id);
  const Proposal* p = find_proposal(contract_id, period_id);
  return p ? p->timeline : std::vector<TimelineEvent>{};
}

Digest Engine::open_contract(const GovernancePolicy& policy, std::string_view program_source, TimestampMs now, Extra extra) {
  validate(policy);
  sla::Program program = sla::parse(program_source);
  const Digest id = contract_id_for(policy, program_source);
  if (contracts_.count(id)) throw Error(ErrorCode::conflict, "contract already open: " + id.hex());

  const TimestampMs ts = stamp(now);
  std::vector<AnchorEntry> entries{
      {AnchorKind::policy, crypto::sha256(canonical_bytes(policy)), ref("policy", id)},
      {AnchorKind::policy, program.source_digest, ref("program", id)},
  };
  entries.insert(entries.end(), extra.begin(), extra.end());
  contracts_.emplace(id, Contract{id, policy, std::string(program_source), std::move(program), ts, {}});
  chain_.append_block(std::move(entries), ts);
  clock_ = ts;
  return id;
}

void Engine::commit(Proposal next, std::vector<AnchorEntry> entries, TimestampMs ts) {
  const Digest id = next.id;
  proposals_.insert_or_assign(id, std::move(next));
  chain_.append_block(std::move(entries), ts);
  clock_ = ts;
}

const Proposal& Engine::propose(const Digest& contract_id, const codec::MeasurementReport& report,
                                const crypto::Signature& signature, TimestampMs now, Extra extra) {
  const Contract& contract = contract_or_throw(contract_id);
  codec::validate(report);
  if (report.contract_id != contract_id) throw Error(ErrorCode::invalid, "report belongs to another contract");
  if (report.version != 1) throw Error(ErrorCode::invalid, "a new proposal must carry report version 1");
  const Participant& proposer = participant_or_throw(contract.policy, report.author);
  if (!proposer.proposer) throw Error(ErrorCode::authorization, report.author.text() + " may not propose");
  const Digest digest = codec::report_digest(report);
  check_signature(proposer, digest, signature);
  const Digest pid = proposal_id(contract_id, report.period_id);
  if (proposals_.count(pid)) throw Error(ErrorCode::conflict, "a proposal already exists for period " + report.period_id);

  const TimestampMs ts = stamp(now);
  Proposal next;
  next.id = pid;
  next.contract_id = contract_id;
  next.period_id = report.period_id;
  next.versions.push_back({report, digest, ref("report", pid, "v1"), signature});
  TimelineEvent ev{1, EventKind::proposed, report.author, 1, digest, signature, ts, report, std::nullopt, {}};
  const auto& curve = contract.policy.curve_params();
  std::vector<AnchorEntry> entries{{AnchorKind::report, digest, next.versions.back().anchor_ref},
                                   {AnchorKind::event, event_digest(ev, curve), ref("event", pid, "1")}};
  next.timeline.push_back(std::move(ev));
  entries.insert(entries.end(), extra.begin(), extra.end());

  contracts_.at(contract_id).proposals.emplace(report.period_id, pid);
  commit(std::move(next), std::move(entries), ts);
  return proposals_.at(pid);
}

const Proposal& Engine::resubmit(const Digest& pid, const codec::MeasurementReport& report,
                                 const crypto::Signature& signature, TimestampMs now, Extra extra) {
  const Proposal& current = proposal_or_throw(pid);
  const Contract& contract = contract_or_throw(current.contract_id);
  codec::validate(report);
  if (report.contract_id != current.contract_id || report.period_id != current.period_id)
    throw Error(ErrorCode::invalid, "report belongs to another proposal");
  const Participant& proposer = participant_or_throw(contract.policy, report.author);
  if (!proposer.proposer) throw Error(ErrorCode::authorization, report.author.text() + " may not resubmit");
  const Digest digest = codec::report_digest(report);
  check_signature(proposer, digest, signature);
  if (current.state != ProposalState::rejected && !(current.state == ProposalState::pending_review && current.finalize_failed))
    throw Error(ErrorCode::conflict, "proposal is " + std::string(to_string(current.state)) + ", not open to resubmission");
  if (report.version != current.current_version() + 1)
    throw Error(ErrorCode::conflict, "resubmitted report must carry version " + std::to_string(current.current_version() + 1));

  const TimestampMs ts = stamp(now);
  Proposal next = current;
  next.state = ProposalState::pending_review;
  next.finalize_failed = false;
  next.versions.push_back({report, digest, ref("report", pid, "v" + std::to_string(report.version)), signature});
  const std::uint64_t seq = next.timeline.size() + 1;
  TimelineEvent ev{seq, EventKind::resubmitted, report.author, report.version, digest, signature, ts, report, std::nullopt, {}};
  const auto& curve = contract.policy.curve_params();
  std::vector<AnchorEntry> entries{{AnchorKind::report, digest, next.versions.back().anchor_ref},
                                   {AnchorKind::event, event_digest(ev, curve), ref("event", pid, std::to_string(seq))}};
  next.timeline.push_back(std::move(ev));
  entries.insert(entries.end(), extra.begin(), extra.end());
  commit(std::move(next), std::move(entries), ts);
  return proposals_.at(pid);
}

const TimelineEvent& Engine::observe(const Digest& pid, const crypto::Address& author, std::uint32_t version,
                                     std::string text, const crypto::Signature& signature, TimestampMs now, Extra extra) {
  const Proposal& current = proposal_or_throw(pid);
  const Contract& contract = contract_or_throw(current.contract_id);
  const Participant& p = participant_or_throw(contract.policy, author);
  const Digest z = observation_digest(current.contract_id, current.period_id, version, text);
  check_signature(p, z, signature);
  if (current.state != ProposalState::pending_review)
    throw Error(ErrorCode::conflict, "observations require a proposal under review");
  if (version != current.current_version())
    throw Error(ErrorCode::conflict, "stale version " + std::to_string(version) + "; current is " +
                                         std::to_string(current.current_version()));
  for (const auto& o : current.observations) {
    if (o.author == author && o.version == version && o.text == text)
      throw Error(ErrorCode::conflict, "duplicate observation");
  }

  const TimestampMs ts = stamp(now);
  Proposal next = current;
  next.observations.push_back({author, version, text, signature, ts});
  const std::uint64_t seq = next.timeline.size() + 1;
  TimelineEvent ev{seq, EventKind::observed, author, version, z, signature, ts, std::nullopt, std::nullopt, std::move(text)};
  std::vector<AnchorEntry> entries{
      {AnchorKind::event, event_digest(ev, contract.policy.curve_params()), ref("event", pid, std::to_string(seq))}};
  next.timeline.push_back(std::move(ev));
  entries.insert(entries.end(), extra.begin(), extra.end());
  commit(std::move(next), std::move(entries), ts);
  return proposals_.at(pid).timeline.back();
}

const Proposal& Engine::cast_vote(const Digest& pid, const crypto::Address& voter, std::uint32_t version,
                                  Decision decision, const crypto::Signature& signature, TimestampMs now, Extra extra) {
  const Proposal& current = proposal_or_throw(pid);
  const Contract& contract = contract_or_throw(current.contract_id);
  const Participant& p = participant_or_throw(contract.policy, voter);
  if (version < 1 || version > current.current_version())
    throw Error(ErrorCode::conflict, "no version " + std::to_string(version));
  const Digest z = vote_digest(current.contract_id, current.period_id, version, decision, current.versions[version - 1].digest);
  check_signature(p, z, signature);
  if (version != current.current_version())
    throw Error(ErrorCode::conflict, "stale version " + std::to_string(version) + "; current is " +
                                         std::to_string(current.current_version()));
  if (current.state != ProposalState::pending_review)
    throw Error(ErrorCode::conflict, "proposal is " + std::string(to_string(current.state)));
  for (const auto& v : current.votes) {
    if (v.voter == voter && v.version == version) throw Error(ErrorCode::conflict, voter.text() + " already voted on this version");
  }

  const auto& curve = contract.policy.curve_params();
  const TimestampMs ts = stamp(now);
  Proposal next = current;
  next.votes.push_back({voter, version, decision, signature, ts});
  std::vector<AnchorEntry> entries;
  auto push_event = [&](EventKind kind, std::optional<Decision> d, std::string text) {
    const std::uint64_t seq = next.timeline.size() + 1;
    TimelineEvent ev{seq, kind, voter, version, z, signature, ts, std::nullopt, d, std::move(text)};
    entries.push_back({AnchorKind::event, event_digest(ev, curve), ref("event", pid, std::to_string(seq))});
    next.timeline.push_back(std::move(ev));
  };
  push_event(EventKind::voted, decision, {});

  std::uint64_t approve = 0, reject = 0;
  for (const auto& v : next.votes) {
    if (v.version != version) continue;
    (v.decision == Decision::approve ? approve : reject) += contract.policy.find(v.voter)->weight;
  }
  const std::uint64_t threshold = contract.policy.approval_threshold;
  if (approve >= threshold) {
    const ReportVersion& final_version = next.current();
    std::optional<sla::PayableStatement> payable;
    std::string failure;
    try {
      payable = sla::evaluate(contract.program, final_version.report.metrics);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::evaluation && e.code() != ErrorCode::arithmetic) throw;
      failure = e.what();
    }
    if (payable) {
      next.state = ProposalState::finalized;
      push_event(EventKind::finalized, std::nullopt, {});
      Certificate cert;
      cert.contract_id = next.contract_id;
      cert.period_id = next.period_id;
      cert.final_version = version;
      cert.report_digest = final_version.digest;
      cert.policy = contract.policy;
      cert.program_source = contract.program_source;
      cert.report = final_version.report;
      cert.payable = *payable;
      cert.payable_digest = sla::payable_digest(*payable);
      for (const auto& v : next.votes) {
        if (v.version == version) cert.votes.push_back({v.voter, v.decision, v.signature});
      }
      cert.timeline_digest = timeline_digest(next.timeline, curve);
      cert.anchor_ref = ref("certificate", pid);
      entries.push_back({AnchorKind::payable, cert.payable_digest, ref("payable", pid)});
      entries.push_back({AnchorKind::certificate, certificate_digest(cert), cert.anchor_ref});
      next.certificate = std::move(cert);
    } else {
      next.finalize_failed = true;
      push_event(EventKind::finalize_failed, std::nullopt, failure);
    }
  } else if (contract.policy.total_weight() - reject < threshold) {
    next.state = ProposalState::rejected;
    push_event(EventKind::rejected, std::nullopt, {});
  }
  entries.insert(entries.end(), extra.begin(), extra.end());
  commit(std::move(next), std::move(entries), ts);
  return proposals_.at(pid);
}

std::string Engine::canonical_state() const {
  json contracts = json::array();
  for (const auto& [id, c] : contracts_) contracts.push_back(to_json(c));
  json proposals = json::array();
  for (const auto& [id, p] : proposals_) {
    proposals.push_back(to_json(p, contract_or_throw(p.contract_id).policy.curve_params()));
  }
  return codec::canonical_json({{"contracts", contracts},
                                {"proposals", proposals},
                                {"chain_height", chain_.size()},
                                {"chain_tip", chain_.tip_digest().hex()}});
}

Proposal replay_timeline(const Contract& contract, std::span<const TimelineEvent> events) {
  Engine scratch;
  const Digest cid = scratch.open_contract(contract.policy, contract.program_source, contract.opened_at);
  if (cid != contract.id) throw Error(ErrorCode::corrupt, "contract does not reproduce its id");
  std::optional<Digest> pid;
  try {
    for (const auto& e : events) {
      switch (e.kind) {
        case EventKind::proposed:
          if (!e.report) throw Error(ErrorCode::corrupt, "proposed event without a report");
          pid = scratch.propose(cid, *e.report, e.signature, e.timestamp).id;
          break;
        case EventKind::resubmitted:
          if (!e.report || !pid) throw Error(ErrorCode::corrupt, "resubmitted event out of place");
          scratch.resubmit(*pid, *e.report, e.signature, e.timestamp);
          break;
        case EventKind::observed:
          if (!pid) throw Error(ErrorCode::corrupt, "observation before proposal");
          scratch.observe(*pid, e.actor, e.version, e.text, e.signature, e.timestamp);
          break;
        case EventKind::voted:
          if (!pid || !e.decision) throw Error(ErrorCode::corrupt, "vote event out of place");
          scratch.cast_vote(*pid, e.actor, e.version, *e.decision, e.signature, e.timestamp);
          break;
        default:
          break;  // derived from the preceding vote
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::corrupt) throw;
    throw Error(ErrorCode::corrupt, std::string("timeline does not replay: ") + e.what());
  }
  if (!pid) {
    if (!events.empty()) throw Error(ErrorCode::corrupt, "timeline has no proposal");
    return Proposal{};
  }
  Proposal out = *scratch.find_proposal(*pid);
  if (!std::equal(out.timeline.begin(), out.timeline.end(), events.begin(), events.end()))
    throw Error(ErrorCode::corrupt, "replayed timeline differs from the recorded one");
  return out;
}

}  // namespace ags::consensus

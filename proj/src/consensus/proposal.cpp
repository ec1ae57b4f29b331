#include "ags/consensus/proposal.hpp"

#include <set>

#include "ags/crypto/hash.hpp"
#include "ags/error.hpp"
#include "ags/slalang/program.hpp"

namespace ags::consensus {

using nlohmann::json;

std::string_view to_string(Decision d) { return d == Decision::approve ? "approve" : "reject"; }

Decision decision_from_string(std::string_view text) {
  if (text == "approve") return Decision::approve;
  if (text == "reject") return Decision::reject;
  throw Error(ErrorCode::invalid, "decision must be approve or reject");
}

Bytes vote_bytes(const Digest& contract_id, std::string_view period_id, std::uint32_t version, Decision decision,
                 const Digest& report_digest) {
  Bytes out;
  append(out, contract_id.view());
  append(out, period_id);
  append_be32(out, version);
  append_u8(out, static_cast<std::uint8_t>(decision));
  append(out, report_digest.view());
  return out;
}

Digest vote_digest(const Digest& contract_id, std::string_view period_id, std::uint32_t version, Decision decision,
                   const Digest& report_digest) {
  return crypto::sha256(vote_bytes(contract_id, period_id, version, decision, report_digest));
}

Bytes observation_bytes(const Digest& contract_id, std::string_view period_id, std::uint32_t version,
                        std::string_view text) {
  Bytes out;
  append(out, contract_id.view());
  append_be32(out, static_cast<std::uint32_t>(period_id.size()));
  append(out, period_id);
  append_be32(out, version);
  append(out, text);
  return out;
}

Digest observation_digest(const Digest& contract_id, std::string_view period_id, std::uint32_t version,
                          std::string_view text) {
  return crypto::sha256(observation_bytes(contract_id, period_id, version, text));
}

Digest proposal_id(const Digest& contract_id, std::string_view period_id) {
  crypto::Sha256 h;
  h.update(contract_id.view());
  h.update(period_id);
  return h.finalize();
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::contract_opened: return "contract_opened";
    case EventKind::proposed: return "proposed";
    case EventKind::observed: return "observed";
    case EventKind::voted: return "voted";
    case EventKind::rejected: return "rejected";
    case EventKind::resubmitted: return "resubmitted";
    case EventKind::finalized: return "finalized";
    case EventKind::finalize_failed: return "finalize_failed";
  }
  return "unknown";
}

EventKind event_kind_from_string(std::string_view text) {
  for (int k = 1; k <= 8; ++k) {
    if (to_string(static_cast<EventKind>(k)) == text) return static_cast<EventKind>(k);
  }
  throw Error(ErrorCode::invalid, "unknown event kind: " + std::string(text));
}

std::string_view to_string(ProposalState state) {
  switch (state) {
    case ProposalState::pending_review: return "pending_review";
    case ProposalState::rejected: return "rejected";
    case ProposalState::finalized: return "finalized";
  }
  return "unknown";
}

namespace {

crypto::Signature sig_from_json(const json& j, const crypto::CurveParams& curve) {
  return crypto::Signature::from_bytes(curve, from_hex(j.get<std::string>()));
}

}  // namespace

json to_json(const TimelineEvent& e, const crypto::CurveParams& curve) {
  return {{"seq", e.seq},
          {"kind", to_string(e.kind)},
          {"actor", e.actor.text()},
          {"version", e.version},
          {"payload_digest", e.payload_digest.hex()},
          {"signature", e.signature.hex(curve)},
          {"timestamp", format_rfc3339(e.timestamp)},
          {"report", e.report ? codec::to_json(*e.report) : json(nullptr)},
          {"decision", e.decision ? json(to_string(*e.decision)) : json(nullptr)},
          {"text", e.text}};
}

TimelineEvent event_from_json(const json& j, const crypto::CurveParams& curve) {
  try {
    TimelineEvent e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.kind = event_kind_from_string(j.at("kind").get<std::string>());
    e.actor = crypto::Address::parse(j.at("actor").get<std::string>());
    e.version = j.at("version").get<std::uint32_t>();
    e.payload_digest = Digest::from_hex(j.at("payload_digest").get<std::string>());
    e.signature = sig_from_json(j.at("signature"), curve);
    e.timestamp = parse_rfc3339(j.at("timestamp").get<std::string>());
    if (!j.at("report").is_null()) e.report = codec::report_from_json(j.at("report"));
    if (!j.at("decision").is_null()) e.decision = decision_from_string(j.at("decision").get<std::string>());
    e.text = j.at("text").get<std::string>();
    return e;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::invalid, std::string("malformed timeline event: ") + ex.what());
  }
}

Digest event_digest(const TimelineEvent& event, const crypto::CurveParams& curve) {
  return crypto::sha256(codec::canonical_json(to_json(event, curve)));
}

Digest timeline_digest(std::span<const TimelineEvent> events, const crypto::CurveParams& curve) {
  crypto::Sha256 h;
  for (const auto& e : events) h.update(event_digest(e, curve).view());
  return h.finalize();
}

json to_json(const Certificate& c) {
  const auto& curve = c.policy.curve_params();
  json votes = json::array();
  for (const auto& v : c.votes)
    votes.push_back({{"voter", v.voter.text()}, {"decision", to_string(v.decision)}, {"signature", v.signature.hex(curve)}});
  return {{"contract_id", c.contract_id.hex()},
          {"period_id", c.period_id},
          {"final_version", c.final_version},
          {"report_digest", c.report_digest.hex()},
          {"policy", to_json(c.policy)},
          {"program", c.program_source},
          {"report", codec::to_json(c.report)},
          {"payable", sla::to_json(c.payable)},
          {"payable_digest", c.payable_digest.hex()},
          {"votes", votes},
          {"timeline_digest", c.timeline_digest.hex()},
          {"anchor_ref", c.anchor_ref}};
}

Certificate certificate_from_json(const json& j) {
  try {
    Certificate c;
    c.policy = policy_from_json(j.at("policy"));
    const auto& curve = c.policy.curve_params();
    c.contract_id = Digest::from_hex(j.at("contract_id").get<std::string>());
    c.period_id = j.at("period_id").get<std::string>();
    c.final_version = j.at("final_version").get<std::uint32_t>();
    c.report_digest = Digest::from_hex(j.at("report_digest").get<std::string>());
    c.program_source = j.at("program").get<std::string>();
    c.report = codec::report_from_json(j.at("report"));
    c.payable = sla::payable_from_json(j.at("payable"));
    c.payable_digest = Digest::from_hex(j.at("payable_digest").get<std::string>());
    for (const auto& v : j.at("votes")) {
      c.votes.push_back({crypto::Address::parse(v.at("voter").get<std::string>()),
                         decision_from_string(v.at("decision").get<std::string>()), sig_from_json(v.at("signature"), curve)});
    }
    c.timeline_digest = Digest::from_hex(j.at("timeline_digest").get<std::string>());
    c.anchor_ref = j.at("anchor_ref").get<std::string>();
    return c;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::invalid, std::string("malformed certificate: ") + ex.what());
  }
}

Digest certificate_digest(const Certificate& cert) { return crypto::sha256(codec::canonical_json(to_json(cert))); }

CertificateVerdict verify_certificate(const Certificate& cert, std::span<const ledger::AnchorBlock> chain) {
  auto reject = [](std::string reason, std::string detail) { return CertificateVerdict{false, std::move(reason), std::move(detail)}; };
  try {
    validate(cert.policy);
  } catch (const Error& e) {
    return reject("policy", e.what());
  }
  if (contract_id_for(cert.policy, cert.program_source) != cert.contract_id)
    return reject("contract", "contract id does not match policy and program");

  std::set<crypto::Address> voters;
  std::uint64_t approve_weight = 0;
  for (const auto& v : cert.votes) {
    const Participant* p = cert.policy.find(v.voter);
    if (!p) return reject("signature", "voter is not a participant: " + v.voter.text());
    const Digest z = vote_digest(cert.contract_id, cert.period_id, cert.final_version, v.decision, cert.report_digest);
    if (!crypto::verify(p->pubkey, z, v.signature)) return reject("signature", "vote signature invalid for " + v.voter.text());
    if (!voters.insert(v.voter).second) return reject("threshold", "duplicate vote by " + v.voter.text());
    if (v.decision == Decision::approve) approve_weight += p->weight;
  }
  if (approve_weight < cert.policy.approval_threshold)
    return reject("threshold", "approving weight " + std::to_string(approve_weight) + " below threshold");

  try {
    if (codec::report_digest(cert.report) != cert.report_digest) return reject("report", "report digest mismatch");
  } catch (const Error& e) {
    return reject("report", e.what());
  }
  if (cert.report.version != cert.final_version || cert.report.contract_id != cert.contract_id ||
      cert.report.period_id != cert.period_id)
    return reject("report", "report does not belong to this certificate");

  try {
    const auto program = sla::parse(cert.program_source);
    if (sla::evaluate(program, cert.report.metrics) != cert.payable) return reject("payable", "payable does not recompute");
  } catch (const Error& e) {
    return reject("payable", e.what());
  }
  if (sla::payable_digest(cert.payable) != cert.payable_digest) return reject("payable", "payable digest mismatch");

  const auto verdict = ledger::verify_chain(chain);
  if (!verdict.ok) return reject("anchor", "anchor chain invalid: " + verdict.reason);
  auto anchored = [&](ledger::AnchorKind kind, const Digest& d) {
    for (const auto& b : chain) {
      for (const auto& e : b.entries) {
        if (e.kind == kind && e.digest == d) return true;
      }
    }
    return false;
  };
  if (!anchored(ledger::AnchorKind::report, cert.report_digest)) return reject("anchor", "report digest is not anchored");
  if (!anchored(ledger::AnchorKind::payable, cert.payable_digest)) return reject("anchor", "payable digest is not anchored");
  if (!anchored(ledger::AnchorKind::certificate, certificate_digest(cert)))
    return reject("anchor", "certificate digest is not anchored");
  return {};
}

json to_json(const Proposal& p, const crypto::CurveParams& curve) {
  json versions = json::array();
  for (std::size_t i = 0; i < p.versions.size(); ++i) {
    const auto& v = p.versions[i];
    versions.push_back({{"version", i + 1},
                        {"report", codec::to_json(v.report)},
                        {"digest", v.digest.hex()},
                        {"anchor_ref", v.anchor_ref},
                        {"signature", v.signature.hex(curve)}});
  }
  json votes = json::array();
  for (const auto& v : p.votes) {
    votes.push_back({{"voter", v.voter.text()},
                     {"version", v.version},
                     {"decision", to_string(v.decision)},
                     {"signature", v.signature.hex(curve)},
                     {"timestamp", format_rfc3339(v.timestamp)}});
  }
  json observations = json::array();
  for (const auto& o : p.observations) {
    observations.push_back({{"author", o.author.text()},
                            {"version", o.version},
                            {"text", o.text},
                            {"signature", o.signature.hex(curve)},
                            {"timestamp", format_rfc3339(o.timestamp)}});
  }
  json timeline = json::array();
  for (const auto& e : p.timeline) timeline.push_back(to_json(e, curve));
  return {{"id", p.id.hex()},
          {"contract_id", p.contract_id.hex()},
          {"period_id", p.period_id},
          {"state", to_string(p.state)},
          {"current_version", p.current_version()},
          {"versions", versions},
          {"votes", votes},
          {"observations", observations},
          {"timeline", timeline},
          {"certificate", p.certificate ? to_json(*p.certificate) : json(nullptr)},
          {"finalize_failed", p.finalize_failed}};
}

}  // namespace ags::consensus

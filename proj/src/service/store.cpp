#include "ags/service/store.hpp"

#include "ags/codec/report.hpp"
#include "ags/consensus/proposal.hpp"
#include "ags/crypto/hash.hpp"
#include "ags/error.hpp"

namespace ags::service {

using nlohmann::json;

Digest envelope_payload_digest(std::string_view action, const json& payload) {
  crypto::Sha256 h;
  h.update(action);
  const std::uint8_t zero = 0;
  h.update(ByteView(&zero, 1));
  h.update(codec::canonical_json(payload));
  return h.finalize();
}

Digest envelope_signing_digest(const Digest& payload_digest, std::uint64_t nonce) {
  Bytes buf(payload_digest.bytes().begin(), payload_digest.bytes().end());
  append_be64(buf, nonce);
  return crypto::sha256(buf);
}

json to_json(const Envelope& env) {
  return {{"action", env.action}, {"actor", env.actor.text()}, {"pubkey", env.pubkey},
          {"nonce", env.nonce},   {"payload", env.payload},       {"sig", env.sig}};
}

Envelope envelope_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::invalid, "envelope must be a JSON object");
  try {
    Envelope env;
    env.action = j.at("action").get<std::string>();
    env.actor = crypto::Address::parse(j.at("actor").get<std::string>());
    env.pubkey = j.at("pubkey").get<std::string>();
    env.nonce = j.at("nonce").get<std::uint64_t>();
    env.payload = j.at("payload");
    env.sig = j.at("sig").get<std::string>();
    return env;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid, std::string("malformed envelope: ") + e.what());
  }
}

Envelope sign_envelope(const crypto::PrivateKey& key, std::string action, json payload, std::uint64_t nonce) {
  const auto pub = crypto::derive_public(key);
  Envelope env;
  env.action = std::move(action);
  env.actor = crypto::derive_address(pub);
  env.pubkey = pub.hex();
  env.nonce = nonce;
  env.payload = std::move(payload);
  const Digest z = envelope_signing_digest(envelope_payload_digest(env.action, env.payload), nonce);
  env.sig = crypto::sign(key, z).hex(key.curve());
  return env;
}

void verify_envelope(const Envelope& env, const crypto::CurveParams& curve) {
  std::optional<crypto::PublicKey> pub;
  crypto::Signature sig;
  try {
    pub.emplace(crypto::PublicKey::parse(curve, from_hex(env.pubkey)));
    sig = crypto::Signature::from_bytes(curve, from_hex(env.sig));
  } catch (const Error& e) {
    throw Error(ErrorCode::authentication, std::string("envelope key or signature unreadable: ") + e.what());
  }
  if (crypto::derive_address(*pub) != env.actor) throw Error(ErrorCode::authentication, "envelope key does not match actor");
  const Digest z = envelope_signing_digest(envelope_payload_digest(env.action, env.payload), env.nonce);
  if (!crypto::verify(*pub, z, sig)) throw Error(ErrorCode::authentication, "envelope signature does not verify");
}

namespace {

json record_json_without_digest(const StoreRecord& r) {
  json j = to_json(r.envelope);
  j["seq"] = r.seq;
  j["ts"] = format_rfc3339(r.ts);
  j["payload_digest"] = r.payload_digest.hex();
  j["prev"] = r.prev.hex();
  return j;
}

}  // namespace

Digest compute_record_digest(const StoreRecord& record) {
  return crypto::sha256(codec::canonical_json(record_json_without_digest(record)));
}

std::string record_to_line(const StoreRecord& record) {
  json j = record_json_without_digest(record);
  j["digest"] = record.digest.hex();
  return codec::canonical_json(j);
}

StoreRecord record_from_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::corrupt, std::string("record is not valid JSON: ") + e.what());
  }
  StoreRecord r;
  try {
    if (!j.is_object() || j.size() != 11) throw Error(ErrorCode::corrupt, "record must have exactly 11 fields");
    r.seq = j.at("seq").get<std::uint64_t>();
    r.ts = parse_rfc3339(j.at("ts").get<std::string>());
    r.payload_digest = Digest::from_hex(j.at("payload_digest").get<std::string>());
    r.prev = Digest::from_hex(j.at("prev").get<std::string>());
    r.digest = Digest::from_hex(j.at("digest").get<std::string>());
    r.envelope = envelope_from_json(j);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::corrupt, std::string("record fields malformed: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::corrupt, e.what());
  }
  if (record_to_line(r) != line) throw Error(ErrorCode::corrupt, "record is not in canonical form");
  return r;
}

std::uint64_t State::last_nonce(const crypto::Address& actor) const {
  auto it = nonces_.find(actor);
  return it == nonces_.end() ? 0 : it->second;
}

json State::apply(const StoreRecord& record) {
  if (record.seq != height_ + 1) throw Error(ErrorCode::corrupt, "record seq is not the next in sequence");
  if (record.prev != last_digest_) throw Error(ErrorCode::corrupt, "record prev does not match predecessor");
  if (record.ts < last_ts_) throw Error(ErrorCode::corrupt, "record timestamp precedes predecessor");
  if (compute_record_digest(record) != record.digest) throw Error(ErrorCode::corrupt, "record digest mismatch");
  if (envelope_payload_digest(record.envelope.action, record.envelope.payload) != record.payload_digest)
    throw Error(ErrorCode::corrupt, "payload digest mismatch");
  verify_envelope(record.envelope, *curve_);
  if (record.envelope.nonce <= last_nonce(record.envelope.actor))
    throw Error(ErrorCode::conflict, "nonce " + std::to_string(record.envelope.nonce) + " already used by " +
                                         record.envelope.actor.text());

  json result = dispatch(record);

  nonces_[record.envelope.actor] = record.envelope.nonce;
  height_ = record.seq;
  last_digest_ = record.digest;
  last_ts_ = record.ts;
  return result;
}

namespace {

crypto::Signature sig_field(const json& payload, const char* name, const crypto::CurveParams& curve) {
  return crypto::Signature::from_bytes(curve, from_hex(payload.at(name).get<std::string>()));
}

void require_actor(const crypto::Address& actor, const crypto::Address& expected, const char* role) {
  if (actor != expected) throw Error(ErrorCode::authorization, std::string("envelope actor is not the ") + role);
}

}  // namespace

json State::dispatch(const StoreRecord& record) {
  const Envelope& env = record.envelope;
  const json& p = env.payload;
  const consensus::Engine::Extra extra{
      {ledger::AnchorKind::envelope, record.digest, "envelope:" + std::to_string(record.seq)}};
  try {
    if (env.action == "open_contract") {
      const auto policy = consensus::policy_from_json(p.at("policy"));
      if (&policy.curve_params() != curve_) throw Error(ErrorCode::invalid, "policy curve differs from the service curve");
      if (!policy.find(env.actor)) throw Error(ErrorCode::authorization, "only a participant may open the contract");
      const Digest id = engine_.open_contract(policy, p.at("program").get<std::string>(), record.ts, extra);
      return {{"contract_id", id.hex()}, {"contract", consensus::to_json(*engine_.find_contract(id))}};
    }
    if (env.action == "propose") {
      const auto report = codec::report_from_json(p.at("report"));
      require_actor(env.actor, report.author, "report author");
      const Digest cid = Digest::from_hex(p.at("contract_id").get<std::string>());
      const auto& prop = engine_.propose(cid, report, sig_field(p, "report_sig", *curve_), record.ts, extra);
      return consensus::to_json(prop, *curve_);
    }
    if (env.action == "resubmit") {
      const auto report = codec::report_from_json(p.at("report"));
      require_actor(env.actor, report.author, "report author");
      const Digest pid = Digest::from_hex(p.at("proposal_id").get<std::string>());
      const auto& prop = engine_.resubmit(pid, report, sig_field(p, "report_sig", *curve_), record.ts, extra);
      return consensus::to_json(prop, *curve_);
    }
    if (env.action == "observe") {
      const Digest pid = Digest::from_hex(p.at("proposal_id").get<std::string>());
      const auto& ev = engine_.observe(pid, env.actor, p.at("version").get<std::uint32_t>(), p.at("text").get<std::string>(),
                                       sig_field(p, "sig", *curve_), record.ts, extra);
      return consensus::to_json(ev, *curve_);
    }
    if (env.action == "vote") {
      const Digest pid = Digest::from_hex(p.at("proposal_id").get<std::string>());
      const auto decision = consensus::decision_from_string(p.at("decision").get<std::string>());
      const auto& prop = engine_.cast_vote(pid, env.actor, p.at("version").get<std::uint32_t>(), decision,
                                           sig_field(p, "sig", *curve_), record.ts, extra);
      return consensus::to_json(prop, *curve_);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid, std::string("malformed payload: ") + e.what());
  }
  throw Error(ErrorCode::invalid, "unknown action: " + env.action);
}

std::string State::canonical() const {
  json nonces = json::object();
  for (const auto& [actor, n] : nonces_) nonces[actor.text()] = n;
  return codec::canonical_json({{"engine", json::parse(engine_.canonical_state())},
                                {"nonces", nonces},
                                {"height", height_},
                                {"last_digest", last_digest_.hex()},
                                {"last_ts", last_ts_}});
}

ReplayOutcome replay_store(std::string_view text, const crypto::CurveParams& curve, bool strict) {
  ReplayOutcome out{State(curve), true, std::nullopt, {}, 0, false};
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::uint64_t seq = out.state.height() + 1;
    const std::size_t nl = text.find('\n', pos);
    const bool terminated = nl != std::string_view::npos;
    const std::string_view line = text.substr(pos, terminated ? nl - pos : std::string_view::npos);
    if (!terminated && strict) {
      out.ok = false;
      out.first_bad_seq = seq;
      out.reason = "record lacks a terminating newline";
      return out;
    }
    try {
      out.state.apply(record_from_line(line));
    } catch (const Error& e) {
      if (!terminated) {
        out.torn_tail = true;
        return out;
      }
      out.ok = false;
      out.first_bad_seq = seq;
      out.reason = e.what();
      return out;
    }
    pos = terminated ? nl + 1 : text.size();
    out.valid_bytes = pos;
  }
  return out;
}

}  // namespace ags::service

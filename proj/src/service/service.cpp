#include "ags/service/service.hpp"

#include <unistd.h>

#include <fstream>
#include <mutex>
#include <sstream>

#include "ags/codec/report.hpp"
#include "ags/consensus/proposal.hpp"
#include "ags/slalang/evaluator.hpp"

namespace ags::service {

using nlohmann::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid: return 400;
    case ErrorCode::authentication: return 401;
    case ErrorCode::authorization: return 403;
    case ErrorCode::not_found: return 404;
    case ErrorCode::conflict: return 409;
    case ErrorCode::evaluation:
    case ErrorCode::arithmetic: return 422;
    case ErrorCode::io:
    case ErrorCode::corrupt: return 500;
  }
  return 500;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_line(std::FILE* f, const std::string& line) {
  const std::string data = line + "\n";
  if (std::fwrite(data.data(), 1, data.size(), f) != data.size() || std::fflush(f) != 0 || ::fsync(fileno(f)) != 0)
    throw Error(ErrorCode::io, "append failed");
}

std::FILE* open_append(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "ab");
  if (!f) throw Error(ErrorCode::io, "cannot open " + path);
  return f;
}

void rewrite_file(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error(ErrorCode::io, "cannot write " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error(ErrorCode::io, "cannot replace " + path);
}

Response error_response(const Error& e) {
  return {http_status(e.code()), {{"error", to_string(e.code())}, {"message", e.what()}}};
}

Digest digest_param(const std::string& text, const char* what) {
  try {
    return Digest::from_hex(text);
  } catch (const Error&) {
    throw Error(ErrorCode::invalid, std::string("malformed ") + what);
  }
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t pos = 1;
  while (pos <= path.size()) {
    const std::size_t slash = path.find('/', pos);
    const std::size_t end = slash == std::string::npos ? path.size() : slash;
    parts.push_back(path.substr(pos, end - pos));
    pos = end + 1;
  }
  return parts;
}

}  // namespace

Service::Service(Config config) : config_(std::move(config)), curve_(&crypto::curve_by_name(config_.curve)), state_(*curve_) {
  if (config_.store_path.empty()) return;
  const std::string text = read_file(config_.store_path);
  ReplayOutcome replay = replay_store(text, *curve_, false);
  if (!replay.ok)
    throw Error(ErrorCode::corrupt, "store record " + std::to_string(*replay.first_bad_seq) + ": " + replay.reason);
  state_ = std::move(replay.state);
  if (replay.torn_tail) {
    rewrite_file(config_.store_path, text.substr(0, replay.valid_bytes));
  } else if (!text.empty() && text.back() != '\n') {
    rewrite_file(config_.store_path, text + "\n");
  }

  const std::string anchors_file = anchors_path(config_.store_path);
  const std::string expected = state_.engine().chain().to_jsonl();
  const std::string existing = read_file(anchors_file);
  const auto verdict = ledger::verify_chain_jsonl(existing);
  if (existing.size() > expected.size() || expected.compare(0, existing.size(), existing) != 0) {
    // Anything other than a prefix of the replayed chain is tampering.
    std::uint64_t height = verdict.ok ? 0 : *verdict.first_invalid_height;
    if (verdict.ok) {
      const auto& blocks = state_.engine().chain().blocks();
      std::size_t pos = 0;
      for (; height < blocks.size(); ++height) {
        const std::string line = ledger::block_to_json_line(blocks[height]) + "\n";
        if (existing.compare(pos, line.size(), line) != 0) break;
        pos += line.size();
      }
    }
    throw Error(ErrorCode::corrupt, "anchor file diverges from the store at height " + std::to_string(height));
  }
  if (existing != expected) rewrite_file(anchors_file, expected);
  store_ = open_append(config_.store_path);
  anchors_ = open_append(anchors_file);
}

Service::~Service() {
  if (store_) std::fclose(store_);
  if (anchors_) std::fclose(anchors_);
}

std::uint64_t Service::height() const {
  std::shared_lock lock(mu_);
  return state_.height();
}

std::string Service::canonical_state() const {
  std::shared_lock lock(mu_);
  return state_.canonical();
}

std::uint64_t Service::last_nonce(const crypto::Address& actor) const {
  std::shared_lock lock(mu_);
  return state_.last_nonce(actor);
}

std::vector<ledger::AnchorBlock> Service::anchor_blocks() const {
  std::shared_lock lock(mu_);
  return state_.engine().chain().blocks();
}

Response Service::handle(const Request& request) {
  try {
    return route(request);
  } catch (const Error& e) {
    return error_response(e);
  } catch (const json::exception& e) {
    return {400, {{"error", "invalid"}, {"message", e.what()}}};
  }
}

Response Service::mutate(const std::string& action, const json& body, const std::function<void(const Envelope&)>& check) {
  Envelope env = envelope_from_json(body);
  if (env.action != action) throw Error(ErrorCode::invalid, "envelope action does not match the endpoint");
  check(env);

  std::unique_lock lock(mu_);
  if (failed_) throw Error(ErrorCode::io, "store append failed earlier; restart the service");
  StoreRecord record;
  record.seq = state_.height() + 1;
  record.ts = std::max(config_.clock(), state_.last_ts());
  record.payload_digest = envelope_payload_digest(env.action, env.payload);
  record.prev = state_.last_digest();
  record.envelope = std::move(env);
  record.digest = compute_record_digest(record);

  json entity = state_.apply(record);
  if (store_) {
    try {
      write_line(store_, record_to_line(record));
      write_line(anchors_, ledger::block_to_json_line(state_.engine().chain().tip()));
    } catch (const Error&) {
      failed_ = true;
      throw;
    }
  }
  const auto& tip = state_.engine().chain().tip();
  return {action == "vote" || action == "resubmit" ? 200 : 201,
          {{"seq", record.seq},
           {"record_digest", record.digest.hex()},
           {"anchor", {{"height", tip.height}, {"block_digest", tip.block_digest.hex()}}},
           {"result", std::move(entity)}}};
}

Response Service::route(const Request& req) {
  const auto parts = split_path(req.path);
  if (parts.empty() || parts[0] != "v1") throw Error(ErrorCode::not_found, "no route for " + req.path);
  const std::size_t n = parts.size();
  auto body = [&] {
    try {
      return json::parse(req.body);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::invalid, std::string("body is not JSON: ") + e.what());
    }
  };
  auto payload_id = [](const Envelope& env, const char* field, const Digest& expected) {
    if (!env.payload.is_object() || !env.payload.contains(field) || !env.payload.at(field).is_string() ||
        env.payload.at(field).get<std::string>() != expected.hex())
      throw Error(ErrorCode::invalid, std::string("payload ") + field + " does not match the path");
  };

  if (req.method == "POST") {
    if (n == 2 && parts[1] == "contracts") return mutate("open_contract", body(), [](const Envelope&) {});
    if (n == 4 && parts[1] == "contracts" && parts[3] == "proposals") {
      const Digest cid = digest_param(parts[2], "contract id");
      return mutate("propose", body(), [&](const Envelope& env) { payload_id(env, "contract_id", cid); });
    }
    if (n == 4 && parts[1] == "proposals") {
      const Digest pid = digest_param(parts[2], "proposal id");
      auto check = [&](const Envelope& env) { payload_id(env, "proposal_id", pid); };
      if (parts[3] == "observations") return mutate("observe", body(), check);
      if (parts[3] == "votes") return mutate("vote", body(), check);
      if (parts[3] == "resubmit") return mutate("resubmit", body(), check);
    }
    throw Error(ErrorCode::not_found, "no route for POST " + req.path);
  }
  if (req.method != "GET") throw Error(ErrorCode::invalid, "unsupported method " + req.method);

  std::shared_lock lock(mu_);
  const auto& engine = state_.engine();
  const auto& chain = engine.chain();
  if (n == 2 && parts[1] == "healthz") {
    return {200,
            {{"status", "ok"},
             {"height", state_.height()},
             {"chain_height", chain.size()},
             {"chain_tip", chain.tip_digest().hex()},
             {"curve", curve_->name}}};
  }
  if (n == 2 && parts[1] == "anchors") {
    auto it = req.query.find("digest");
    if (it == req.query.end()) {
      json blocks = json::array();
      for (const auto& b : chain.blocks()) blocks.push_back(json::parse(ledger::block_to_json_line(b)));
      return {200, {{"blocks", blocks}}};
    }
    const Digest d = digest_param(it->second, "digest");
    json matches = json::array();
    for (const auto& pos : chain.find_entry(d)) {
      const auto& block = chain.blocks()[pos.height];
      const auto& entry = block.entries[pos.index];
      matches.push_back({{"height", pos.height},
                         {"index", pos.index},
                         {"kind", ledger::to_string(entry.kind)},
                         {"ref", entry.ref},
                         {"block_digest", block.block_digest.hex()}});
    }
    return {200, {{"digest", d.hex()}, {"matches", matches}}};
  }
  if (n == 3 && parts[1] == "actors") {
    const auto actor = crypto::Address::parse(parts[2]);
    return {200, {{"address", actor.text()}, {"nonce", state_.last_nonce(actor)}}};
  }
  if (n >= 3 && parts[1] == "contracts") {
    const Digest cid = digest_param(parts[2], "contract id");
    const consensus::Contract* c = engine.find_contract(cid);
    if (!c) throw Error(ErrorCode::not_found, "unknown contract " + cid.hex());
    if (n == 3) return {200, consensus::to_json(*c)};
    if (n == 5 && parts[3] == "certificates") {
      const consensus::Proposal* p = engine.find_proposal(cid, parts[4]);
      if (!p || !p->certificate) throw Error(ErrorCode::not_found, "no certificate for period " + parts[4]);
      return {200,
              {{"certificate", consensus::to_json(*p->certificate)},
               {"certificate_digest", consensus::certificate_digest(*p->certificate).hex()}}};
    }
  }
  if (n >= 3 && parts[1] == "proposals") {
    const Digest pid = digest_param(parts[2], "proposal id");
    const consensus::Proposal* p = engine.find_proposal(pid);
    if (!p) throw Error(ErrorCode::not_found, "unknown proposal " + pid.hex());
    if (n == 3) return {200, consensus::to_json(*p, *curve_)};
    if (n == 4 && parts[3] == "timeline") {
      json events = json::array();
      for (const auto& e : p->timeline) events.push_back(consensus::to_json(e, *curve_));
      return {200,
              {{"proposal_id", pid.hex()},
               {"events", events},
               {"timeline_digest", consensus::timeline_digest(p->timeline, *curve_).hex()}}};
    }
    if (n == 4 && parts[3] == "payable") {
      const consensus::Contract& c = *engine.find_contract(p->contract_id);
      std::uint32_t version = p->current_version();
      sla::ValueMap overrides;
      for (const auto& [key, value] : req.query) {
        if (key == "version") {
          version = static_cast<std::uint32_t>(std::stoul(value));
        } else if (key.rfind("param.", 0) == 0) {
          overrides[key.substr(6)] = Decimal::parse(value);
        } else {
          throw Error(ErrorCode::invalid, "unknown query parameter " + key);
        }
      }
      if (version < 1 || version > p->current_version()) throw Error(ErrorCode::not_found, "no such version");
      const auto& metrics = p->versions[version - 1].report.metrics;
      const auto statement = sla::evaluate(c.program, metrics, overrides);
      json trace = json::array();
      for (const auto& t : sla::explain(c.program, metrics, overrides)) {
        json value = std::holds_alternative<bool>(t.value) ? json(std::get<bool>(t.value))
                                                           : json(std::get<Decimal>(t.value).to_string());
        trace.push_back({{"label", t.label}, {"value", value}});
      }
      return {200,
              {{"version", version},
               {"statement", sla::to_json(statement)},
               {"payable_digest", sla::payable_digest(statement).hex()},
               {"trace", trace}}};
    }
  }
  throw Error(ErrorCode::not_found, "no route for GET " + req.path);
}

}  // namespace ags::service

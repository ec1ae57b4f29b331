#include "ags/service/client.hpp"

#include <httplib.h>

#include "ags/crypto/address.hpp"
#include "ags/error.hpp"

namespace ags::service {

using nlohmann::json;

Transport embedded_transport(Service& service) {
  return [&service](const Request& req) { return service.handle(req); };
}

Transport http_transport(const std::string& endpoint) {
  auto client = std::make_shared<httplib::Client>(endpoint);
  client->set_connection_timeout(5);
  return [client, endpoint](const Request& req) {
    httplib::Params params(req.query.begin(), req.query.end());
    httplib::Result result = req.method == "POST"
                                 ? client->Post(req.path, req.body, "application/json")
                                 : client->Get(req.path, params, httplib::Headers{});
    if (!result) throw Error(ErrorCode::io, "cannot reach " + endpoint + ": " + httplib::to_string(result.error()));
    Response res;
    res.status = result->status;
    try {
      res.body = json::parse(result->body);
    } catch (const json::exception&) {
      res.body = {{"error", "io"}, {"message", "response is not JSON"}};
    }
    return res;
  };
}

Client::Client(Transport transport, std::optional<crypto::PrivateKey> key)
    : transport_(std::move(transport)), key_(std::move(key)) {}

const crypto::PrivateKey& Client::key() const {
  if (!key_) throw Error(ErrorCode::invalid, "a signing key is required");
  return *key_;
}

crypto::Address Client::address() const { return crypto::derive_address(crypto::derive_public(key())); }

Response Client::get(const std::string& path, std::map<std::string, std::string> query) const {
  return transport_({"GET", path, std::move(query), {}});
}

Response Client::submit(const std::string& action, const std::string& path, json payload) const {
  const Response actor = get("/v1/actors/" + address().text());
  if (actor.status != 200) return actor;
  const std::uint64_t nonce = actor.body.at("nonce").get<std::uint64_t>() + 1;
  const Envelope env = sign_envelope(key(), action, std::move(payload), nonce);
  return transport_({"POST", path, {}, to_json(env).dump()});
}

Response Client::open_contract(const consensus::GovernancePolicy& policy, const std::string& program) const {
  return submit("open_contract", "/v1/contracts", {{"policy", consensus::to_json(policy)}, {"program", program}});
}

Response Client::propose(codec::MeasurementReport report) const {
  report.author = address();
  const auto sig = crypto::sign(key(), codec::report_digest(report));
  const std::string cid = report.contract_id.hex();
  return submit("propose", "/v1/contracts/" + cid + "/proposals",
                {{"contract_id", cid}, {"report", codec::to_json(report)}, {"report_sig", sig.hex(key().curve())}});
}

Response Client::resubmit(const Digest& proposal_id, codec::MeasurementReport report) const {
  report.author = address();
  const auto sig = crypto::sign(key(), codec::report_digest(report));
  return submit("resubmit", "/v1/proposals/" + proposal_id.hex() + "/resubmit",
                {{"proposal_id", proposal_id.hex()},
                 {"report", codec::to_json(report)},
                 {"report_sig", sig.hex(key().curve())}});
}

Response Client::observe(const Digest& proposal_id, const std::string& text, std::optional<std::uint32_t> version) const {
  const Response prop = get("/v1/proposals/" + proposal_id.hex());
  if (prop.status != 200) return prop;
  const std::uint32_t v = version.value_or(prop.body.at("current_version").get<std::uint32_t>());
  const Digest cid = Digest::from_hex(prop.body.at("contract_id").get<std::string>());
  const auto sig =
      crypto::sign(key(), consensus::observation_digest(cid, prop.body.at("period_id").get<std::string>(), v, text));
  return submit("observe", "/v1/proposals/" + proposal_id.hex() + "/observations",
                {{"proposal_id", proposal_id.hex()}, {"version", v}, {"text", text}, {"sig", sig.hex(key().curve())}});
}

Response Client::vote(const Digest& proposal_id, consensus::Decision decision, std::optional<std::uint32_t> version) const {
  const Response prop = get("/v1/proposals/" + proposal_id.hex());
  if (prop.status != 200) return prop;
  const auto& versions = prop.body.at("versions");
  const std::uint32_t v = version.value_or(prop.body.at("current_version").get<std::uint32_t>());
  // An unknown version is signed over a zero digest and left for the server to reject.
  Digest report_digest;
  if (v >= 1 && v <= versions.size()) report_digest = Digest::from_hex(versions.at(v - 1).at("digest").get<std::string>());
  const Digest cid = Digest::from_hex(prop.body.at("contract_id").get<std::string>());
  const auto sig = crypto::sign(
      key(), consensus::vote_digest(cid, prop.body.at("period_id").get<std::string>(), v, decision, report_digest));
  return submit("vote", "/v1/proposals/" + proposal_id.hex() + "/votes",
                {{"proposal_id", proposal_id.hex()},
                 {"version", v},
                 {"decision", consensus::to_string(decision)},
                 {"sig", sig.hex(key().curve())}});
}

}  // namespace ags::service

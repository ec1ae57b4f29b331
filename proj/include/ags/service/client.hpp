#pragma once

#include <functional>
#include <optional>
#include <string>

#include "ags/codec/report.hpp"
#include "ags/consensus/policy.hpp"
#include "ags/consensus/proposal.hpp"
#include "ags/crypto/ecdsa.hpp"
#include "ags/service/service.hpp"

namespace ags::service {

using Transport = std::function<Response(const Request&)>;

Transport embedded_transport(Service& service);
// endpoint: http://host:port
Transport http_transport(const std::string& endpoint);

// Builds and signs requests. Nonces come from GET /v1/actors/{address}.
// Helpers that need current proposal data fetch it first and return the
// failing response if that lookup fails.
class Client {
 public:
  Client(Transport transport, std::optional<crypto::PrivateKey> key = std::nullopt);

  Response get(const std::string& path, std::map<std::string, std::string> query = {}) const;
  Response submit(const std::string& action, const std::string& path, nlohmann::json payload) const;

  Response open_contract(const consensus::GovernancePolicy& policy, const std::string& program) const;
  // Sets the report author to this client's address and signs the report.
  Response propose(codec::MeasurementReport report) const;
  Response resubmit(const Digest& proposal_id, codec::MeasurementReport report) const;
  Response observe(const Digest& proposal_id, const std::string& text, std::optional<std::uint32_t> version = {}) const;
  Response vote(const Digest& proposal_id, consensus::Decision decision,
                std::optional<std::uint32_t> version = {}) const;

  const crypto::PrivateKey& key() const;
  crypto::Address address() const;

 private:
  Transport transport_;
  std::optional<crypto::PrivateKey> key_;
};

}  // namespace ags::service

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ags/bytes.hpp"
#include "ags/crypto/address.hpp"
#include "ags/crypto/ecdsa.hpp"

namespace ags::consensus {

// A participant is identified by address; the public key is carried so that
// signatures can be checked without any out-of-band key registry.
struct Participant {
  crypto::Address address;
  crypto::PublicKey pubkey;
  std::uint32_t weight = 1;
  bool proposer = false;

  friend bool operator==(const Participant&, const Participant&) = default;
};

struct GovernancePolicy {
  std::string curve = "secp256k1";
  std::vector<Participant> participants;  // sorted by address
  std::uint64_t approval_threshold = 1;

  const crypto::CurveParams& curve_params() const;
  const Participant* find(const crypto::Address& address) const;
  std::uint64_t total_weight() const;

  friend bool operator==(const GovernancePolicy&, const GovernancePolicy&) = default;
};

// Builds a policy from keys; addresses are derived and participants sorted.
GovernancePolicy make_policy(std::string curve, const std::vector<std::pair<crypto::PublicKey, std::uint32_t>>& members,
                             std::uint64_t threshold, const std::vector<std::size_t>& proposers);

// Throws Error(invalid): fewer than 2 participants, duplicate or mismatched
// addresses, zero weight, threshold outside [1, total weight], keys on the
// wrong curve.
void validate(const GovernancePolicy& policy);

// curve length(4) || curve || threshold(8) || count(4) || per participant in
// address order: address length(4) || address || pubkey length(4) || pubkey ||
// weight(4) || proposer(1)
Bytes canonical_bytes(const GovernancePolicy& policy);

nlohmann::json to_json(const GovernancePolicy& policy);
GovernancePolicy policy_from_json(const nlohmann::json& j);

// sha256(canonical policy bytes || program source bytes)
Digest contract_id_for(const GovernancePolicy& policy, std::string_view program_source);

}  // namespace ags::consensus

#include "ags/consensus/policy.hpp"

#include <algorithm>
#include <set>

#include "ags/crypto/hash.hpp"
#include "ags/error.hpp"

namespace ags::consensus {

const crypto::CurveParams& GovernancePolicy::curve_params() const { return crypto::curve_by_name(curve); }

const Participant* GovernancePolicy::find(const crypto::Address& address) const {
  for (const auto& p : participants) {
    if (p.address == address) return &p;
  }
  return nullptr;
}

std::uint64_t GovernancePolicy::total_weight() const {
  std::uint64_t sum = 0;
  for (const auto& p : participants) sum += p.weight;
  return sum;
}

GovernancePolicy make_policy(std::string curve, const std::vector<std::pair<crypto::PublicKey, std::uint32_t>>& members,
                             std::uint64_t threshold, const std::vector<std::size_t>& proposers) {
  GovernancePolicy policy;
  policy.curve = std::move(curve);
  policy.approval_threshold = threshold;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const bool proposer = std::find(proposers.begin(), proposers.end(), i) != proposers.end();
    policy.participants.push_back({crypto::derive_address(members[i].first), members[i].first, members[i].second, proposer});
  }
  std::sort(policy.participants.begin(), policy.participants.end(),
            [](const Participant& a, const Participant& b) { return a.address < b.address; });
  validate(policy);
  return policy;
}

void validate(const GovernancePolicy& policy) {
  const auto& curve = policy.curve_params();
  if (policy.participants.size() < 2) throw Error(ErrorCode::invalid, "policy needs at least 2 participants");
  std::set<crypto::Address> seen;
  for (std::size_t i = 0; i < policy.participants.size(); ++i) {
    const auto& p = policy.participants[i];
    if (&p.pubkey.curve() != &curve) throw Error(ErrorCode::invalid, "participant key is not on the policy curve");
    if (crypto::derive_address(p.pubkey) != p.address)
      throw Error(ErrorCode::invalid, "participant address does not match its public key: " + p.address.text());
    if (!seen.insert(p.address).second) throw Error(ErrorCode::invalid, "duplicate participant " + p.address.text());
    if (p.weight == 0) throw Error(ErrorCode::invalid, "participant weight must be positive");
    if (i > 0 && !(policy.participants[i - 1].address < p.address))
      throw Error(ErrorCode::invalid, "participants must be sorted by address");
  }
  if (policy.approval_threshold < 1 || policy.approval_threshold > policy.total_weight())
    throw Error(ErrorCode::invalid, "approval threshold must be between 1 and the total weight");
}

Bytes canonical_bytes(const GovernancePolicy& policy) {
  validate(policy);
  Bytes out;
  append_be32(out, static_cast<std::uint32_t>(policy.curve.size()));
  append(out, policy.curve);
  append_be64(out, policy.approval_threshold);
  append_be32(out, static_cast<std::uint32_t>(policy.participants.size()));
  for (const auto& p : policy.participants) {
    append_be32(out, static_cast<std::uint32_t>(p.address.text().size()));
    append(out, p.address.text());
    const Bytes key = p.pubkey.serialize();
    append_be32(out, static_cast<std::uint32_t>(key.size()));
    append(out, key);
    append_be32(out, p.weight);
    append_u8(out, p.proposer ? 1 : 0);
  }
  return out;
}

nlohmann::json to_json(const GovernancePolicy& policy) {
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& p : policy.participants) {
    parts.push_back({{"address", p.address.text()}, {"pubkey", p.pubkey.hex()}, {"weight", p.weight}, {"proposer", p.proposer}});
  }
  return {{"curve", policy.curve}, {"threshold", policy.approval_threshold}, {"participants", parts}};
}

GovernancePolicy policy_from_json(const nlohmann::json& j) {
  try {
    GovernancePolicy policy;
    policy.curve = j.at("curve").get<std::string>();
    const auto& curve = policy.curve_params();
    policy.approval_threshold = j.at("threshold").get<std::uint64_t>();
    for (const auto& item : j.at("participants")) {
      const auto pub = crypto::PublicKey::parse(curve, from_hex(item.at("pubkey").get<std::string>()));
      const auto address = crypto::derive_address(pub);
      if (item.contains("address") && crypto::Address::parse(item.at("address").get<std::string>()) != address)
        throw Error(ErrorCode::invalid, "participant address does not match its public key");
      const auto weight = item.at("weight").get<std::int64_t>();
      if (weight < 1 || weight > UINT32_MAX) throw Error(ErrorCode::invalid, "participant weight out of range");
      policy.participants.push_back(
          {address, pub, static_cast<std::uint32_t>(weight), item.contains("proposer") && item.at("proposer").get<bool>()});
    }
    std::sort(policy.participants.begin(), policy.participants.end(),
              [](const Participant& a, const Participant& b) { return a.address < b.address; });
    validate(policy);
    return policy;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid, std::string("malformed policy: ") + e.what());
  }
}

Digest contract_id_for(const GovernancePolicy& policy, std::string_view program_source) {
  crypto::Sha256 h;
  h.update(ByteView(canonical_bytes(policy)));
  h.update(program_source);
  return h.finalize();
}

}  // namespace ags::consensus

#pragma once

#include <string>

#include "ags/codec/report.hpp"
#include "ags/consensus/proposal.hpp"
#include "ags/crypto/address.hpp"
#include "ags/crypto/ecdsa.hpp"

namespace ags::testing {

inline const char* kUptimeProgram =
    "param base = 1000\n"
    "param C = 100\n"
    "metric U\n"
    "payable: if U >= 99.9 then base else base - C * (99.9 - U)\n";

struct Party {
  crypto::PrivateKey key;
  crypto::PublicKey pub;
  crypto::Address address;

  Party(const crypto::CurveParams& curve, unsigned long d)
      : key(curve, mpz_class(d)), pub(crypto::derive_public(key)), address(crypto::derive_address(pub)) {}

  crypto::Signature sign(const Digest& z) const { return crypto::sign(key, z); }

  crypto::Signature sign_report(const codec::MeasurementReport& r) const { return sign(codec::report_digest(r)); }

  crypto::Signature sign_vote(const Digest& cid, const std::string& period, std::uint32_t version,
                              consensus::Decision d, const Digest& report_digest) const {
    return sign(consensus::vote_digest(cid, period, version, d, report_digest));
  }

  crypto::Signature sign_observation(const Digest& cid, const std::string& period, std::uint32_t version,
                                     const std::string& text) const {
    return sign(consensus::observation_digest(cid, period, version, text));
  }
};

inline codec::MeasurementReport make_report(const Digest& cid, const std::string& period, std::uint32_t version,
                                            const crypto::Address& author, const std::string& uptime) {
  codec::MeasurementReport r;
  r.contract_id = cid;
  r.period_id = period;
  r.version = version;
  r.author = author;
  r.metrics["U"] = Decimal::parse(uptime);
  return r;
}

}  // namespace ags::testing

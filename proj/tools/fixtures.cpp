#include "fixtures.hpp"

#include "ags/codec/report.hpp"
#include "ags/consensus/policy.hpp"
#include "ags/consensus/proposal.hpp"
#include "ags/crypto/address.hpp"
#include "ags/crypto/curve.hpp"
#include "ags/crypto/ecdsa.hpp"
#include "ags/crypto/hash.hpp"
#include "ags/ledger/chain.hpp"
#include "ags/service/store.hpp"
#include "ags/slalang/evaluator.hpp"
#include "ags/slalang/program.hpp"

namespace ags::fixtures {

using nlohmann::json;

namespace {

const char* kProgram =
    "param base = 1000\n"
    "param C = 100\n"
    "metric U\n"
    "payable: if U >= 99.9 then base else base - C * (99.9 - U)\n";

Digest filled(std::uint8_t b) { return Digest::from_bytes(Bytes(32, b)); }

codec::MeasurementReport sample_report(const crypto::Address& author, std::uint32_t version, const char* uptime) {
  codec::MeasurementReport r;
  r.contract_id = filled(0x11);
  r.period_id = "2024-05";
  r.version = version;
  r.author = author;
  r.metrics = {{"U", Decimal::parse(uptime)}, {"latency_ms", Decimal(120)}};
  r.notes = "ok";
  r.attachment_digests = {filled(0x22)};
  return r;
}

std::string scalar_hex(const mpz_class& v, const crypto::CurveParams& curve) {
  return to_hex(crypto::to_fixed_be(v, curve.order_bytes));
}

json key_json(const crypto::PrivateKey& key) {
  const auto pub = crypto::derive_public(key);
  return {{"curve", key.curve().name},
          {"private_key", scalar_hex(key.scalar(), key.curve())},
          {"key_file", key.key_file()},
          {"public_key", pub.hex()},
          {"address", crypto::derive_address(pub).text()}};
}

json vector(const std::string& id, const crypto::PrivateKey& key, const std::string& kind, const json& inputs,
            const Bytes& message, const Digest& digest) {
  const auto sig = crypto::sign(key, digest);
  const auto& curve = key.curve();
  // The nonce actually used: the first counter giving nonzero r and s.
  std::string nonce;
  const mpz_class e = crypto::digest_to_scalar(digest, curve);
  for (std::uint32_t counter = 0; nonce.empty(); ++counter) {
    const mpz_class k = crypto::derive_nonce(key, digest, counter);
    const mpz_class r = mpz_class(crypto::scalar_mul(k, curve.G, curve).x() % curve.n);
    mpz_class k_inv;
    mpz_invert(k_inv.get_mpz_t(), k.get_mpz_t(), curve.n.get_mpz_t());
    const mpz_class s = mpz_class(k_inv * (e + r * key.scalar()) % curve.n);
    if (r != 0 && s != 0) nonce = scalar_hex(k, curve);
  }
  return {{"id", id},
          {"key", key_json(key)},
          {"kind", kind},
          {"inputs", inputs},
          {"message", to_hex(message)},
          {"digest", digest.hex()},
          {"nonce", nonce},
          {"r", scalar_hex(sig.r, curve)},
          {"s", scalar_hex(sig.s, curve)},
          {"signature", sig.hex(curve)}};
}

}  // namespace

json sigvectors() {
  const auto& k1 = crypto::secp256k1();
  const crypto::PrivateKey keys[] = {
      {k1, 1},
      {k1, mpz_class("a11ce", 16)},
      {k1, mpz_class("b0b", 16)},
      {k1, k1.n - 1},
      {k1, mpz_class("c9afa9d845ba75166b5c215767b1d6934e50c3db36e89b127b8a622b120f6721", 16)},
  };
  json vectors = json::array();
  int n = 0;
  auto next_id = [&](const std::string& kind) { return kind + "-" + std::to_string(++n); };

  for (const auto& key : keys) {
    const auto author = crypto::derive_address(crypto::derive_public(key));
    const auto report = sample_report(author, 1, "99.4");
    const Digest rd = codec::report_digest(report);
    vectors.push_back(vector(next_id("report"), key, "report", codec::to_json(report), codec::canonical_bytes(report), rd));

    for (const auto decision : {consensus::Decision::approve, consensus::Decision::reject}) {
      const json inputs = {{"contract_id", filled(0x11).hex()},
                           {"period_id", "2024-05"},
                           {"version", 1},
                           {"decision", consensus::to_string(decision)},
                           {"report_digest", rd.hex()}};
      vectors.push_back(vector(next_id("vote"), key, "vote", inputs,
                               consensus::vote_bytes(filled(0x11), "2024-05", 1, decision, rd),
                               consensus::vote_digest(filled(0x11), "2024-05", 1, decision, rd)));
    }

    const std::string text = "latency probe disagrees for the 14th";
    vectors.push_back(vector(next_id("observation"), key, "observation",
                             {{"contract_id", filled(0x11).hex()}, {"period_id", "2024-05"}, {"version", 1}, {"text", text}},
                             consensus::observation_bytes(filled(0x11), "2024-05", 1, text),
                             consensus::observation_digest(filled(0x11), "2024-05", 1, text)));

    const json payload = {{"proposal_id", consensus::proposal_id(filled(0x11), "2024-05").hex()},
                          {"version", 1},
                          {"decision", "approve"},
                          {"sig", crypto::sign(key, consensus::vote_digest(filled(0x11), "2024-05", 1,
                                                                         consensus::Decision::approve, rd))
                                      .hex(k1)}};
    const Digest pd = service::envelope_payload_digest("vote", payload);
    Bytes signing(pd.bytes().begin(), pd.bytes().end());
    append_be64(signing, 7);
    vectors.push_back(vector(next_id("envelope"), key, "envelope",
                             {{"action", "vote"}, {"nonce", 7}, {"payload", payload}, {"payload_digest", pd.hex()}},
                             signing, service::envelope_signing_digest(pd, 7)));
  }

  for (int d : {2, 7, 18}) {
    const crypto::PrivateKey key(crypto::toy_curve(), d);
    const Bytes msg = {0x61, 0x62, 0x63};
    vectors.push_back(vector(next_id("toy"), key, "message", {{"text", "abc"}}, msg, crypto::sha256(msg)));
  }

  return {{"format", 1},
          {"hash", "sha256 over message"},
          {"signature", "r || s, each big-endian and as wide as the group order"},
          {"nonce",
           "k = 1 + (HMAC-SHA256(d, z || counter BE4 || 0x00) || HMAC-SHA256(d, z || counter BE4 || 0x01)) mod (n - 1), "
           "d as order-width big-endian bytes; counter starts at 0 and advances while r or s is zero"},
          {"vectors", vectors}};
}

json canonical_dumps() {
  const auto author = crypto::Address::parse("1EHNa6Q4Jz2uvNExL497mE43ikXhwF6kZm");
  json reports = json::array();
  for (const auto& report : {sample_report(author, 2, "99.4"), sample_report(author, 1, "-0.000000001")}) {
    reports.push_back({{"report", codec::to_json(report)},
                       {"bytes", to_hex(codec::canonical_bytes(report))},
                       {"digest", codec::report_digest(report).hex()}});
  }
  codec::MeasurementReport bare;
  bare.contract_id = filled(0x00);
  bare.period_id = "p";
  bare.version = 1;
  bare.author = author;
  reports.push_back({{"report", codec::to_json(bare)},
                     {"bytes", to_hex(codec::canonical_bytes(bare))},
                     {"digest", codec::report_digest(bare).hex()}});

  json votes = json::array();
  for (const auto decision : {consensus::Decision::approve, consensus::Decision::reject}) {
    votes.push_back({{"contract_id", filled(0xaa).hex()},
                     {"period_id", "2024-05"},
                     {"version", 3},
                     {"decision", consensus::to_string(decision)},
                     {"report_digest", filled(0xbb).hex()},
                     {"bytes", to_hex(consensus::vote_bytes(filled(0xaa), "2024-05", 3, decision, filled(0xbb)))},
                     {"digest", consensus::vote_digest(filled(0xaa), "2024-05", 3, decision, filled(0xbb)).hex()}});
  }

  const std::string text = "ok";
  json observation = {{"contract_id", filled(0xaa).hex()},
                      {"period_id", "2024-05"},
                      {"version", 1},
                      {"text", text},
                      {"bytes", to_hex(consensus::observation_bytes(filled(0xaa), "2024-05", 1, text))},
                      {"digest", consensus::observation_digest(filled(0xaa), "2024-05", 1, text).hex()}};

  const auto& k1 = crypto::secp256k1();
  const auto policy = consensus::make_policy(
      "secp256k1",
      {{crypto::derive_public(crypto::PrivateKey(k1, 1)), 2}, {crypto::derive_public(crypto::PrivateKey(k1, 2)), 1}}, 2,
      {0});
  json policy_dump = {{"policy", consensus::to_json(policy)},
                      {"bytes", to_hex(consensus::canonical_bytes(policy))},
                      {"program", kProgram},
                      {"contract_id", consensus::contract_id_for(policy, kProgram).hex()},
                      {"proposal_id_for_2024_05",
                       consensus::proposal_id(consensus::contract_id_for(policy, kProgram), "2024-05").hex()}};

  const json payload = {{"contract_id", filled(0xaa).hex()}, {"note", "x"}};
  const Digest pd = service::envelope_payload_digest("propose", payload);
  json envelope = {{"action", "propose"},
                   {"payload", payload},
                   {"payload_bytes", to_hex(as_bytes(std::string("propose") + std::string(1, '\0') + payload.dump()))},
                   {"payload_digest", pd.hex()},
                   {"nonce", 1},
                   {"signing_digest", service::envelope_signing_digest(pd, 1).hex()}};

  const std::vector<ledger::AnchorEntry> entries = {
      {ledger::AnchorKind::report, crypto::sha256("abc"), "report:x:v1"}};
  ledger::AnchorBlock block{0, Digest{}, 1700000000000, entries,
                            ledger::compute_block_digest(0, Digest{}, 1700000000000, entries)};
  json block_dump = {{"line", ledger::block_to_json_line(block)}, {"digest", block.block_digest.hex()}};

  const auto program = sla::parse(kProgram);
  const auto statement = sla::evaluate(program, {{"U", Decimal::parse("99.4")}});
  json payable = {{"program", kProgram},
                  {"metrics", {{"U", "99.4"}}},
                  {"statement", sla::to_json(statement)},
                  {"bytes", to_hex(sla::canonical_bytes(statement))},
                  {"digest", sla::payable_digest(statement).hex()}};

  return {{"format", 1},
          {"reports", reports},
          {"votes", votes},
          {"observation", observation},
          {"policy", policy_dump},
          {"envelope", envelope},
          {"anchor_block", block_dump},
          {"payable", payable}};
}

}  // namespace ags::fixtures

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "ags/crypto/curve.hpp"
#include "ags/error.hpp"
#include "ags/service/client.hpp"
#include "ags/service/service.hpp"
#include "parties.hpp"
#include "workload.hpp"

using namespace ags;
using namespace ags::service;
using ags::testing::Members;
using ags::testing::kUptimeProgram;
using ags::testing::make_report;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ags_service_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string store() const { return (path / "store.jsonl").string(); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

Config config_for(const std::string& store) { return {store, "secp256k1", ags::testing::stepping_clock()}; }

ErrorCode open_error(const std::string& store) {
  try {
    Service svc(config_for(store));
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected the service to refuse the store");
  return ErrorCode::invalid;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    out.push_back(text.substr(pos, nl - pos + 1));
    pos = nl + 1;
  }
  return out;
}

struct Deployment {
  Members m;
  Service svc{config_for("")};
  Client a{embedded_transport(svc), m.a};
  Client b{embedded_transport(svc), m.b};
  Client c{embedded_transport(svc), m.c};
  Digest cid;
  Digest pid;

  Deployment() {
    const auto r = a.open_contract(m.policy(), kUptimeProgram);
    REQUIRE(r.status == 201);
    cid = Digest::from_hex(r.body["result"]["contract_id"].get<std::string>());
    pid = consensus::proposal_id(cid, "2024-05");
  }

  Response propose(const std::string& uptime = "99.4") { return a.propose(make_report(cid, "2024-05", 1, {}, uptime)); }
};

}  // namespace

TEST_CASE("happy path over the request interface pays 950") {
  Deployment d;
  CHECK(d.propose().status == 201);
  CHECK(d.c.observe(d.pid, "latency looks fine").status == 201);
  CHECK(d.a.vote(d.pid, consensus::Decision::approve).status == 200);
  CHECK(d.b.vote(d.pid, consensus::Decision::approve).status == 200);
  const auto last = d.c.vote(d.pid, consensus::Decision::approve);
  REQUIRE(last.status == 200);
  CHECK(last.body["result"]["state"] == "finalized");

  const auto cert = d.a.get("/v1/contracts/" + d.cid.hex() + "/certificates/2024-05");
  REQUIRE(cert.status == 200);
  CHECK(cert.body["certificate"]["payable"]["total"] == "950");
  const auto parsed = consensus::certificate_from_json(cert.body["certificate"]);
  const auto blocks = d.svc.anchor_blocks();
  CHECK(consensus::verify_certificate(parsed, blocks).ok);
  CHECK(cert.body["certificate_digest"] == consensus::certificate_digest(parsed).hex());

  const auto timeline = d.a.get("/v1/proposals/" + d.pid.hex() + "/timeline");
  REQUIRE(timeline.status == 200);
  CHECK(timeline.body["events"].size() == 6);

  const auto lookup = d.a.get("/v1/anchors", {{"digest", cert.body["certificate_digest"]}});
  REQUIRE(lookup.status == 200);
  REQUIRE(lookup.body["matches"].size() == 1);
  CHECK(lookup.body["matches"][0]["kind"] == "certificate");

  const auto health = d.a.get("/v1/healthz");
  CHECK(health.body["height"] == 6);
  CHECK(health.body["chain_height"] == 6);
  CHECK(health.body["chain_tip"] == blocks.back().block_digest.hex());
}

TEST_CASE("payable dry run with parameter overrides") {
  Deployment d;
  REQUIRE(d.propose().status == 201);
  const std::string path = "/v1/proposals/" + d.pid.hex() + "/payable";
  auto r = d.a.get(path);
  REQUIRE(r.status == 200);
  CHECK(r.body["statement"]["total"] == "950");
  CHECK(r.body["trace"].back()["label"] == "payable");
  r = d.a.get(path, {{"param.C", "200"}});
  CHECK(r.body["statement"]["total"] == "900");
  CHECK(d.a.get(path, {{"param.nope", "1"}}).status == 422);
  CHECK(d.a.get(path, {{"version", "2"}}).status == 404);
  CHECK(d.a.get(path, {{"colour", "red"}}).status == 400);
  // dry runs leave no trace
  CHECK(d.svc.height() == 2);
}

TEST_CASE("replayed or stale nonces are refused") {
  Deployment d;
  const auto report = [&] {
    auto r = make_report(d.cid, "2024-05", 1, crypto::derive_address(crypto::derive_public(d.m.a)), "99.4");
    return r;
  }();
  const json payload = {{"contract_id", d.cid.hex()},
                        {"report", codec::to_json(report)},
                        {"report_sig", crypto::sign(d.m.a, codec::report_digest(report)).hex(crypto::secp256k1())}};
  const std::string path = "/v1/contracts/" + d.cid.hex() + "/proposals";
  const Envelope env = sign_envelope(d.m.a, "propose", payload, 2);
  CHECK(d.svc.handle({"POST", path, {}, to_json(env).dump()}).status == 201);
  const auto again = d.svc.handle({"POST", path, {}, to_json(env).dump()});
  CHECK(again.status == 409);
  CHECK(again.body["error"] == "conflict");
  // an older nonce on a different request is also refused
  const Envelope old = sign_envelope(d.m.a, "observe", {{"proposal_id", d.pid.hex()}}, 1);
  CHECK(d.svc.handle({"POST", "/v1/proposals/" + d.pid.hex() + "/observations", {}, to_json(old).dump()}).status == 409);
  CHECK(d.svc.last_nonce(env.actor) == 2);
  CHECK(d.svc.height() == 2);
}

TEST_CASE("signature bypass attempts are refused") {
  Deployment d;
  REQUIRE(d.propose().status == 201);
  const std::string votes = "/v1/proposals/" + d.pid.hex() + "/votes";
  const Digest rd = Digest::from_hex(d.a.get("/v1/proposals/" + d.pid.hex()).body["versions"][0]["digest"].get<std::string>());
  const auto& curve = crypto::secp256k1();
  auto vote_payload = [&](const crypto::PrivateKey& signer) {
    const auto sig = crypto::sign(signer, consensus::vote_digest(d.cid, "2024-05", 1, consensus::Decision::approve, rd));
    return json{{"proposal_id", d.pid.hex()}, {"version", 1}, {"decision", "approve"}, {"sig", sig.hex(curve)}};
  };
  auto post = [&](const std::string& path, const Envelope& env) {
    return d.svc.handle({"POST", path, {}, to_json(env).dump()});
  };

  SUBCASE("inner vote signature by someone else") {
    CHECK(post(votes, sign_envelope(d.m.b, "vote", vote_payload(d.m.c), 1)).status == 401);
  }
  SUBCASE("casting another member's vote with their genuine signature") {
    CHECK(post(votes, sign_envelope(d.m.b, "vote", vote_payload(d.m.a), 1)).status == 401);
  }
  SUBCASE("payload altered after the envelope was signed") {
    Envelope env = sign_envelope(d.m.b, "vote", vote_payload(d.m.b), 1);
    env.payload["decision"] = "reject";
    CHECK(post(votes, env).status == 401);
  }
  SUBCASE("envelope key does not belong to the actor") {
    Envelope env = sign_envelope(d.m.b, "vote", vote_payload(d.m.b), 1);
    env.actor = crypto::derive_address(crypto::derive_public(d.m.c));
    CHECK(post(votes, env).status == 401);
  }
  SUBCASE("proposing someone else's signed report") {
    auto report = make_report(d.cid, "2024-06", 1, crypto::derive_address(crypto::derive_public(d.m.a)), "99.4");
    const json payload = {{"contract_id", d.cid.hex()},
                          {"report", codec::to_json(report)},
                          {"report_sig", crypto::sign(d.m.a, codec::report_digest(report)).hex(curve)}};
    CHECK(post("/v1/contracts/" + d.cid.hex() + "/proposals", sign_envelope(d.m.c, "propose", payload, 1)).status ==
          403);
  }
  SUBCASE("outsider with self-consistent signatures") {
    const crypto::PrivateKey outsider(curve, mpz_class(0x0DD));
    CHECK(post(votes, sign_envelope(outsider, "vote", vote_payload(outsider), 1)).status == 403);
  }
  SUBCASE("path and payload disagree") {
    const Digest other = consensus::proposal_id(d.cid, "2024-06");
    CHECK(post("/v1/proposals/" + other.hex() + "/votes", sign_envelope(d.m.b, "vote", vote_payload(d.m.b), 1))
              .status == 400);
    CHECK(post(votes, sign_envelope(d.m.b, "observe", vote_payload(d.m.b), 1)).status == 400);
  }
  CHECK(d.svc.height() == 2);
  CHECK(d.a.get("/v1/proposals/" + d.pid.hex()).body["votes"].empty());
}

TEST_CASE("error mapping") {
  Deployment d;
  const std::string missing(64, '0');
  CHECK(d.a.get("/v1/contracts/" + missing).status == 404);
  CHECK(d.a.get("/v1/contracts/xyz").status == 400);
  CHECK(d.a.get("/v1/nowhere").status == 404);
  CHECK(d.svc.handle({"POST", "/v1/contracts", {}, "{not json"}).status == 400);
  CHECK(d.svc.handle({"POST", "/v1/contracts", {}, "{}"}).status == 400);
  CHECK(d.svc.handle({"DELETE", "/v1/contracts", {}, ""}).status == 400);
  const auto r = d.b.vote(consensus::proposal_id(d.cid, "never"), consensus::Decision::approve);
  CHECK(r.status == 404);
  CHECK(r.body["error"] == "not_found");
  CHECK(http_status(ErrorCode::evaluation) == 422);
  CHECK(http_status(ErrorCode::arithmetic) == 422);
  CHECK(http_status(ErrorCode::corrupt) == 500);
}

TEST_CASE("restart reproduces state, nonces and anchors") {
  TempDir dir;
  std::string state;
  std::vector<ledger::AnchorBlock> blocks;
  {
    Service svc(config_for(dir.store()));
    ags::testing::run_workload(svc, 100);
    CHECK(svc.height() == 100);
    state = svc.canonical_state();
    blocks = svc.anchor_blocks();
  }
  CHECK(lines_of(slurp(dir.store())).size() == 100);
  const std::string anchors = slurp(Service::anchors_path(dir.store()));
  CHECK(ledger::verify_chain_jsonl(anchors).ok);
  CHECK(lines_of(anchors).size() == 100);

  Service again(config_for(dir.store()));
  CHECK(again.canonical_state() == state);
  CHECK(again.anchor_blocks() == blocks);
  CHECK(slurp(Service::anchors_path(dir.store())) == anchors);

  // replay is a pure function of the store bytes
  const auto r1 = replay_store(slurp(dir.store()), crypto::secp256k1(), true);
  const auto r2 = replay_store(slurp(dir.store()), crypto::secp256k1(), true);
  REQUIRE(r1.ok);
  CHECK(r1.state.canonical() == r2.state.canonical());
  CHECK(r1.state.canonical() == state);

  // the restarted service keeps going where the old one stopped
  Members m;
  Client a(embedded_transport(again), m.a);
  CHECK(again.last_nonce(a.address()) > 0);
  CHECK(a.get("/v1/actors/" + a.address().text()).body["nonce"] == again.last_nonce(a.address()));
}

TEST_CASE("a modified record halts replay at that record") {
  TempDir dir;
  {
    Service svc(config_for(dir.store()));
    ags::testing::run_workload(svc, 12);
  }
  const std::string text = slurp(dir.store());
  auto lines = lines_of(text);
  SUBCASE("changed vote") {
    const auto pos = lines[6].find("\"approve\"");
    const auto alt = pos == std::string::npos ? lines[6].find("\"reject\"") : pos;
    REQUIRE(alt != std::string::npos);
    lines[6][alt + 1] = lines[6][alt + 1] == 'a' ? 'b' : 'a';
  }
  SUBCASE("flipped bit") { lines[6][lines[6].size() / 2] ^= 0x01; }
  SUBCASE("reordered records") { std::swap(lines[6], lines[7]); }
  std::string edited;
  for (const auto& l : lines) edited += l;
  const auto r = replay_store(edited, crypto::secp256k1(), true);
  CHECK_FALSE(r.ok);
  CHECK(r.first_bad_seq == 7);
  CHECK(r.state.height() == 6);
  spit(dir.store(), edited);
  CHECK(open_error(dir.store()) == ErrorCode::corrupt);
}

TEST_CASE("truncation at record boundaries") {
  TempDir dir;
  {
    Service svc(config_for(dir.store()));
    ags::testing::run_workload(svc, 15);
  }
  const auto lines = lines_of(slurp(dir.store()));
  std::string prefix;
  for (std::size_t k = 0; k <= lines.size(); ++k) {
    const auto r = replay_store(prefix, crypto::secp256k1(), true);
    REQUIRE(r.ok);
    CHECK(r.state.height() == k);
    if (k < lines.size()) prefix += lines[k];
  }
  // a truncated store with the full anchor file is refused: the anchors
  // record events the store no longer has
  std::string shorter;
  for (std::size_t k = 0; k < 10; ++k) shorter += lines[k];
  spit(dir.store(), shorter);
  CHECK(open_error(dir.store()) == ErrorCode::corrupt);
}

TEST_CASE("crash injection after each append") {
  TempDir dir;
  {
    Service svc(config_for(dir.store()));
    ags::testing::run_workload(svc, 10);
  }
  const std::string store = slurp(dir.store());
  const std::string anchors = slurp(Service::anchors_path(dir.store()));
  const auto store_lines = lines_of(store);
  const auto anchor_lines = lines_of(anchors);
  std::string expected_state;
  {
    Service svc(config_for(dir.store()));
    expected_state = svc.canonical_state();
  }

  for (std::size_t k = 1; k <= store_lines.size(); ++k) {
    CAPTURE(k);
    std::string store_prefix, anchor_prefix;
    for (std::size_t i = 0; i < k; ++i) store_prefix += store_lines[i];
    for (std::size_t i = 0; i + 1 < k; ++i) anchor_prefix += anchor_lines[i];
    const std::string& record = store_lines[k - 1];

    // crash after the store append, before the anchor append
    spit(dir.store(), store_prefix);
    spit(Service::anchors_path(dir.store()), anchor_prefix);
    {
      Service svc(config_for(dir.store()));
      CHECK(svc.height() == k);
    }
    CHECK(slurp(Service::anchors_path(dir.store())) == anchor_prefix + anchor_lines[k - 1]);

    // crash in the middle of the store append
    for (std::size_t cut : {std::size_t{1}, record.size() / 2, record.size() - 1}) {
      spit(dir.store(), store_prefix.substr(0, store_prefix.size() - record.size() + cut));
      spit(Service::anchors_path(dir.store()), anchor_prefix);
      const bool complete = cut == record.size() - 1;  // only the newline is missing
      {
        Service svc(config_for(dir.store()));
        CHECK(svc.height() == (complete ? k : k - 1));
      }
      CHECK(slurp(dir.store()) == (complete ? store_prefix : store_prefix.substr(0, store_prefix.size() - record.size())));
    }

    // crash in the middle of the anchor append
    spit(dir.store(), store_prefix);
    spit(Service::anchors_path(dir.store()), anchor_prefix + anchor_lines[k - 1].substr(0, 20));
    {
      Service svc(config_for(dir.store()));
      CHECK(svc.height() == k);
    }
    CHECK(slurp(Service::anchors_path(dir.store())) == anchor_prefix + anchor_lines[k - 1]);
  }

  spit(dir.store(), store);
  spit(Service::anchors_path(dir.store()), anchors);
  Service svc(config_for(dir.store()));
  CHECK(svc.canonical_state() == expected_state);
}

TEST_CASE("tampered anchor file is refused") {
  TempDir dir;
  {
    Service svc(config_for(dir.store()));
    ags::testing::run_workload(svc, 8);
  }
  const std::string path = Service::anchors_path(dir.store());
  std::string anchors = slurp(path);
  anchors[anchors.find("\"ref\":\"") + 8] ^= 0x01;
  spit(path, anchors);
  CHECK(open_error(dir.store()) == ErrorCode::corrupt);
}

TEST_CASE("missing anchor file is regenerated") {
  TempDir dir;
  {
    Service svc(config_for(dir.store()));
    ags::testing::run_workload(svc, 8);
  }
  const std::string path = Service::anchors_path(dir.store());
  const std::string anchors = slurp(path);
  fs::remove(path);
  Service svc(config_for(dir.store()));
  CHECK(slurp(path) == anchors);
}

TEST_CASE("http front end") {
  Service svc(config_for(""));
  HttpServer http(svc);
  const int port = http.bind("127.0.0.1", 0);
  std::thread runner([&] { http.run(); });
  Members m;
  const Client a(http_transport("http://127.0.0.1:" + std::to_string(port)), m.a);
  const auto opened = a.open_contract(m.policy(), kUptimeProgram);
  CHECK(opened.status == 201);
  const Digest cid = Digest::from_hex(opened.body["result"]["contract_id"].get<std::string>());
  CHECK(a.propose(make_report(cid, "2024-05", 1, {}, "99.4")).status == 201);
  const auto payable = a.get("/v1/proposals/" + consensus::proposal_id(cid, "2024-05").hex() + "/payable",
                             {{"param.C", "200"}});
  CHECK(payable.status == 200);
  CHECK(payable.body["statement"]["total"] == "900");
  CHECK(a.get("/v1/contracts/" + std::string(64, 'f')).status == 404);
  http.stop();
  runner.join();
}

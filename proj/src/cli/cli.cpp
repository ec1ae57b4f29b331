#include "ags/cli/cli.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ags/analysis/stats.hpp"
#include "ags/codec/report.hpp"
#include "ags/consensus/policy.hpp"
#include "ags/consensus/proposal.hpp"
#include "ags/crypto/address.hpp"
#include "ags/crypto/curve.hpp"
#include "ags/error.hpp"
#include "ags/ledger/chain.hpp"
#include "ags/service/client.hpp"
#include "ags/service/service.hpp"
#include "ags/slalang/evaluator.hpp"
#include "ags/slalang/program.hpp"

namespace ags::cli {

using nlohmann::json;

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* value = std::getenv(name.c_str());
    if (!value || !*value) return std::nullopt;
    return std::string(value);
  };
}

namespace {

struct Outcome {
  int code = ExitCode::ok;
  json body;
  std::string human;  // empty: derived from body
};

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::authentication:
    case ErrorCode::corrupt: return ExitCode::verification;
    case ErrorCode::io: return ExitCode::io;
    default: return ExitCode::usage;
  }
}

int exit_for(const std::string& error_name) {
  if (error_name == "authentication" || error_name == "corrupt") return ExitCode::verification;
  if (error_name == "io") return ExitCode::io;
  return ExitCode::usage;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid, path + ": " + e.what());
  }
}

void write_new_file(const std::string& path, const std::string& text, bool force, mode_t mode) {
  const int flags = O_WRONLY | O_CREAT | (force ? O_TRUNC : O_EXCL);
  const int fd = ::open(path.c_str(), flags, mode);
  if (fd < 0) {
    if (errno == EEXIST) throw Error(ErrorCode::invalid, path + " exists; pass --force to overwrite");
    throw Error(ErrorCode::io, "cannot write " + path);
  }
  const bool good = ::write(fd, text.data(), text.size()) == static_cast<ssize_t>(text.size());
  ::close(fd);
  if (!good) throw Error(ErrorCode::io, "cannot write " + path);
}

std::pair<std::string, Decimal> split_assignment(const std::string& text, const char* what) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::invalid, std::string(what) + " must be NAME=VALUE: " + text);
  return {text.substr(0, eq), Decimal::parse(text.substr(eq + 1))};
}

sla::ValueMap assignments(const std::vector<std::string>& items, const char* what) {
  sla::ValueMap out;
  for (const auto& item : items) {
    auto [name, value] = split_assignment(item, what);
    if (!out.emplace(name, value).second) throw Error(ErrorCode::invalid, std::string("duplicate ") + what + " " + name);
  }
  return out;
}

Digest digest_arg(const std::string& text, const char* what) {
  try {
    return Digest::from_hex(text);
  } catch (const Error&) {
    throw Error(ErrorCode::invalid, std::string(what) + " must be 64 hex characters");
  }
}

Outcome from_response(const service::Response& r) {
  if (r.status < 300) return {ExitCode::ok, r.body, {}};
  const std::string name = r.body.value("error", std::string("io"));
  return {exit_for(name), r.body, "error: " + r.body.value("message", name)};
}

std::string human_of(const json& body) {
  std::string out;
  if (!body.is_object()) return body.dump(2) + "\n";
  for (const auto& [key, value] : body.items()) {
    out += key + ": " + (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
  }
  return out;
}

json trace_json(const std::vector<sla::TraceEntry>& trace) {
  json out = json::array();
  for (const auto& t : trace) {
    json value = std::holds_alternative<bool>(t.value) ? json(std::get<bool>(t.value))
                                                       : json(std::get<Decimal>(t.value).to_string());
    out.push_back({{"label", t.label}, {"value", value}});
  }
  return out;
}

std::string statement_human(const json& statement) {
  std::string out;
  for (const auto& item : statement.at("line_items")) {
    out += item.at("label").get<std::string>() + ": " + item.at("amount").get<std::string>() + "\n";
  }
  out += "total: " + statement.at("total").get<std::string>() + "\n";
  return out;
}

std::vector<ledger::AnchorBlock> blocks_from_json(const json& list) {
  std::vector<ledger::AnchorBlock> blocks;
  for (const auto& b : list) blocks.push_back(ledger::block_from_json_line(b.dump()));
  return blocks;
}

struct Globals {
  std::string endpoint;
  std::string key;
  std::string store;
  std::string curve;
  bool json_out = false;
};

class Session {
 public:
  Session(Globals& g, const EnvLookup& env) : g_(g), env_(env) {}

  void apply_env() {
    auto fallback = [&](std::string& field, const char* name) {
      if (field.empty()) field = env_(name).value_or("");
    };
    fallback(g_.endpoint, "AGS_ENDPOINT");
    fallback(g_.key, "AGS_KEY");
    fallback(g_.store, "AGS_STORE");
    fallback(g_.curve, "AGS_CURVE");
  }

  const Globals& globals() const { return g_; }

  crypto::PrivateKey key() const {
    if (g_.key.empty()) throw Error(ErrorCode::invalid, "a key file is required (--key or AGS_KEY)");
    return crypto::PrivateKey::parse_key_file(read_text(g_.key));
  }

  std::string curve_name() const {
    if (!g_.curve.empty()) return g_.curve;
    if (!g_.key.empty()) return key().curve().name;
    return "secp256k1";
  }

  service::Service& embedded() {
    if (!service_) {
      service::Config config{g_.store, curve_name(), now_ms};
      if (auto start = env_("AGS_CLOCK_START")) {
        const TimestampMs fixed = std::stoll(*start);
        config.clock = [fixed] { return fixed; };
      }
      service_ = std::make_unique<service::Service>(std::move(config));
    }
    return *service_;
  }

  service::Transport transport() {
    if (!g_.endpoint.empty() && !g_.store.empty())
      throw Error(ErrorCode::invalid, "use either an endpoint or a store, not both");
    if (!g_.endpoint.empty()) return service::http_transport(g_.endpoint);
    if (!g_.store.empty()) return service::embedded_transport(embedded());
    throw Error(ErrorCode::invalid, "no service: pass --endpoint or --store");
  }

  service::Client reader() { return service::Client(transport()); }
  service::Client signer() {
    auto k = key();
    return service::Client(transport(), std::move(k));
  }

 private:
  Globals& g_;
  const EnvLookup& env_;
  std::unique_ptr<service::Service> service_;
};

codec::MeasurementReport build_report(const Digest& cid, const std::string& period, std::uint32_t version,
                                      const std::vector<std::string>& metrics, const std::string& notes,
                                      const std::vector<std::string>& attachments) {
  codec::MeasurementReport report;
  report.contract_id = cid;
  report.period_id = period;
  report.version = version;
  report.metrics = assignments(metrics, "metric");
  report.notes = notes;
  for (const auto& a : attachments) report.attachment_digests.push_back(digest_arg(a, "attachment"));
  return report;
}

Outcome verify_store(const std::string& store, const std::string& curve) {
  const std::string text = read_text(store);
  const auto replay = service::replay_store(text, crypto::curve_by_name(curve), true);
  if (!replay.ok) {
    const std::uint64_t seq = *replay.first_bad_seq;
    return {ExitCode::verification,
            {{"ok", false}, {"source", "store"}, {"first_bad_seq", seq}, {"first_bad_height", seq - 1},
             {"reason", replay.reason}},
            "store record " + std::to_string(seq) + " (height " + std::to_string(seq - 1) + "): " + replay.reason + "\n"};
  }
  const auto& chain = replay.state.engine().chain();
  const std::string anchors_path = service::Service::anchors_path(store);
  std::ifstream probe(anchors_path);
  if (probe) {
    const std::string anchors = read_text(anchors_path);
    const auto verdict = ledger::verify_chain_jsonl(anchors);
    bool bad = !verdict.ok;
    std::uint64_t bad_height = bad ? verdict.first_invalid_height.value_or(0) : 0;
    std::string reason = verdict.reason;
    if (!bad) {
      const auto blocks = ledger::AnchorChain::from_jsonl(anchors).blocks();
      for (std::uint64_t h = 0; h < std::max<std::uint64_t>(blocks.size(), chain.size()); ++h) {
        if (h >= blocks.size() || h >= chain.size() || !(blocks[h] == chain.blocks()[h])) {
          bad = true;
          bad_height = h;
          reason = "anchor file disagrees with the store";
          break;
        }
      }
    }
    if (bad) {
      return {ExitCode::verification,
              {{"ok", false}, {"source", "anchors"}, {"first_bad_height", bad_height}, {"reason", reason}},
              "anchor block " + std::to_string(bad_height) + ": " + reason + "\n"};
    }
  }
  return {ExitCode::ok,
          {{"ok", true}, {"source", "store"}, {"records", replay.state.height()}, {"height", chain.size()},
           {"tip", chain.tip_digest().hex()}},
          "ok: " + std::to_string(replay.state.height()) + " records, " + std::to_string(chain.size()) + " blocks\n"};
}

Outcome chain_outcome(const ledger::ChainVerdict& v, std::size_t height, const Digest& tip, const std::string& source) {
  if (!v.ok) {
    return {ExitCode::verification,
            {{"ok", false}, {"source", source}, {"first_bad_height", *v.first_invalid_height}, {"reason", v.reason}},
            "anchor block " + std::to_string(*v.first_invalid_height) + ": " + v.reason + "\n"};
  }
  return {ExitCode::ok,
          {{"ok", true}, {"source", source}, {"height", height}, {"tip", tip.hex()}},
          "ok: " + std::to_string(height) + " blocks\n"};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  Globals g;
  Session session(g, env);
  std::function<Outcome()> action;

  CLI::App app{"Multi-party SLA measurement consensus and billing", "ags"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--endpoint", g.endpoint, "service URL, e.g. http://127.0.0.1:8080 (AGS_ENDPOINT)");
  app.add_option("--key", g.key, "private key file (AGS_KEY)");
  app.add_option("--store", g.store, "store file for embedded mode (AGS_STORE)");
  app.add_option("--curve", g.curve, "curve name: secp256k1 or toy (AGS_CURVE)");
  app.add_flag("--json", g.json_out, "machine-readable output");

  // keygen
  std::string key_out;
  bool force = false;
  auto* keygen = app.add_subcommand("keygen", "generate a private key file");
  keygen->add_option("--out", key_out, "key file to create (defaults to --key)");
  keygen->add_flag("--force", force, "overwrite an existing file");
  keygen->callback([&] {
    action = [&] {
      const std::string path = key_out.empty() ? g.key : key_out;
      if (path.empty()) throw Error(ErrorCode::invalid, "no key file given (--out or --key)");
      const auto key = crypto::PrivateKey::generate(crypto::curve_by_name(g.curve.empty() ? "secp256k1" : g.curve));
      write_new_file(path, key.key_file(), force, 0600);
      const auto pub = crypto::derive_public(key);
      return Outcome{ExitCode::ok,
                     {{"curve", key.curve().name}, {"address", crypto::derive_address(pub).text()}, {"pubkey", pub.hex()},
                      {"key_file", path}},
                     {}};
    };
  });

  // address
  std::string decode;
  auto* address = app.add_subcommand("address", "print the address of the key, or decode an address");
  address->add_option("--decode", decode, "Base58Check address to decode");
  address->callback([&] {
    action = [&] {
      if (!decode.empty()) {
        const auto a = crypto::Address::parse(decode);
        const auto payload = a.payload();
        return Outcome{ExitCode::ok,
                       {{"address", a.text()}, {"version", a.version()},
                        {"payload", to_hex(ByteView(payload.data(), payload.size()))}},
                       {}};
      }
      const auto key = session.key();
      const auto pub = crypto::derive_public(key);
      const auto a = crypto::derive_address(pub);
      return Outcome{ExitCode::ok, {{"curve", key.curve().name}, {"address", a.text()}, {"pubkey", pub.hex()}},
                     a.text() + "\n"};
    };
  });

  // policy init
  std::vector<std::string> members;
  std::uint64_t threshold = 0;
  std::string policy_out;
  auto* policy = app.add_subcommand("policy", "governance policies");
  policy->require_subcommand(1);
  auto* policy_init = policy->add_subcommand("init", "write a policy file");
  policy_init->add_option("--member", members, "<pubkey-hex|key-file>:<weight>[:proposer], repeatable")->required();
  policy_init->add_option("--threshold", threshold, "approving weight needed")->required();
  policy_init->add_option("--out", policy_out, "policy file to create (default: print)");
  policy_init->add_flag("--force", force, "overwrite an existing file");
  policy_init->callback([&] {
    action = [&] {
      const std::string curve = session.curve_name();
      std::vector<std::pair<crypto::PublicKey, std::uint32_t>> list;
      std::vector<std::size_t> proposers;
      for (const auto& m : members) {
        std::vector<std::string> parts;
        std::stringstream ss(m);
        for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
        if (parts.size() < 2 || parts.size() > 3 || (parts.size() == 3 && parts[2] != "proposer"))
          throw Error(ErrorCode::invalid, "member must be <pubkey|key-file>:<weight>[:proposer]: " + m);
        std::optional<crypto::PublicKey> pub;
        if (std::ifstream(parts[0])) {
          pub.emplace(crypto::derive_public(crypto::PrivateKey::parse_key_file(read_text(parts[0]))));
        } else {
          pub.emplace(crypto::PublicKey::parse(crypto::curve_by_name(curve), from_hex(parts[0])));
        }
        std::uint32_t weight = 0;
        try {
          weight = static_cast<std::uint32_t>(std::stoul(parts[1]));
        } catch (const std::exception&) {
          throw Error(ErrorCode::invalid, "weight must be a number: " + m);
        }
        if (parts.size() == 3) proposers.push_back(list.size());
        list.emplace_back(*pub, weight);
      }
      const auto p = consensus::make_policy(curve, list, threshold, proposers);
      const json body = consensus::to_json(p);
      if (!policy_out.empty()) write_new_file(policy_out, body.dump(2) + "\n", force, 0644);
      return Outcome{ExitCode::ok, body, policy_out.empty() ? body.dump(2) + "\n" : "wrote " + policy_out + "\n"};
    };
  });

  // contract create | show
  std::string policy_file, program_file, contract_id;
  auto* contract = app.add_subcommand("contract", "contracts");
  contract->require_subcommand(1);
  auto* contract_create = contract->add_subcommand("create", "open a contract");
  contract_create->add_option("--policy", policy_file, "policy JSON file")->required();
  contract_create->add_option("--program", program_file, "SLA program file")->required();
  contract_create->callback([&] {
    action = [&] {
      const auto p = consensus::policy_from_json(read_json(policy_file));
      const auto r = session.signer().open_contract(p, read_text(program_file));
      Outcome o = from_response(r);
      if (o.code == ExitCode::ok) o.human = "contract " + r.body["result"]["contract_id"].get<std::string>() + "\n";
      return o;
    };
  });
  auto* contract_show = contract->add_subcommand("show", "show a contract");
  contract_show->add_option("id", contract_id, "contract id")->required();
  contract_show->callback([&] {
    action = [&] {
      return from_response(session.reader().get("/v1/contracts/" + digest_arg(contract_id, "contract id").hex()));
    };
  });

  // propose / resubmit
  std::string period, notes, proposal;
  std::vector<std::string> metrics, params, attachments;
  auto* propose = app.add_subcommand("propose", "submit version 1 of a period's report");
  propose->add_option("--contract", contract_id, "contract id")->required();
  propose->add_option("--period", period, "period id")->required();
  propose->add_option("--metric", metrics, "NAME=VALUE, repeatable");
  propose->add_option("--notes", notes, "free-text notes");
  propose->add_option("--attachment", attachments, "attachment digest (hex), repeatable");
  propose->callback([&] {
    action = [&] {
      const auto report = build_report(digest_arg(contract_id, "contract id"), period, 1, metrics, notes, attachments);
      Outcome o = from_response(session.signer().propose(report));
      if (o.code == ExitCode::ok) o.human = "proposal " + o.body["result"]["id"].get<std::string>() + "\n";
      return o;
    };
  });
  auto* resubmit = app.add_subcommand("resubmit", "submit the next version of a report");
  resubmit->add_option("--proposal", proposal, "proposal id")->required();
  resubmit->add_option("--metric", metrics, "NAME=VALUE, repeatable");
  resubmit->add_option("--notes", notes, "free-text notes");
  resubmit->add_option("--attachment", attachments, "attachment digest (hex), repeatable");
  resubmit->callback([&] {
    action = [&] {
      const Digest pid = digest_arg(proposal, "proposal id");
      auto client = session.signer();
      const auto current = client.get("/v1/proposals/" + pid.hex());
      if (current.status != 200) return from_response(current);
      const auto report = build_report(Digest::from_hex(current.body["contract_id"].get<std::string>()),
                                       current.body["period_id"].get<std::string>(),
                                       current.body["current_version"].get<std::uint32_t>() + 1, metrics, notes, attachments);
      Outcome o = from_response(client.resubmit(pid, report));
      if (o.code == ExitCode::ok)
        o.human = "version " + std::to_string(report.version) + " of proposal " + pid.hex() + "\n";
      return o;
    };
  });

  // observe
  std::string text;
  std::optional<std::uint32_t> version;
  auto* observe = app.add_subcommand("observe", "attach an observation to the current version");
  observe->add_option("--proposal", proposal, "proposal id")->required();
  observe->add_option("--text", text, "observation text")->required();
  observe->add_option("--version", version, "report version (default: current)");
  observe->callback([&] {
    action = [&] { return from_response(session.signer().observe(digest_arg(proposal, "proposal id"), text, version)); };
  });

  // vote approve|reject
  std::string decision;
  auto* vote = app.add_subcommand("vote", "approve or reject a report version");
  vote->add_option("decision", decision, "approve or reject")->required()->check(CLI::IsMember({"approve", "reject"}));
  vote->add_option("--proposal", proposal, "proposal id")->required();
  vote->add_option("--version", version, "report version (default: current)");
  vote->callback([&] {
    action = [&] {
      const auto r = session.signer().vote(digest_arg(proposal, "proposal id"), consensus::decision_from_string(decision),
                                           version);
      Outcome o = from_response(r);
      if (o.code == ExitCode::ok) o.human = "state: " + r.body["result"]["state"].get<std::string>() + "\n";
      return o;
    };
  });

  // payable eval
  bool explain = false;
  auto* payable = app.add_subcommand("payable", "payable statements");
  payable->require_subcommand(1);
  auto* payable_eval = payable->add_subcommand("eval", "evaluate a program locally or a proposal on the service");
  auto* program_opt = payable_eval->add_option("--program", program_file, "SLA program file");
  auto* proposal_opt = payable_eval->add_option("--proposal", proposal, "proposal id (dry run on the service)");
  program_opt->excludes(proposal_opt);
  payable_eval->add_option("--metric", metrics, "NAME=VALUE, repeatable (with --program)");
  payable_eval->add_option("--param", params, "NAME=VALUE parameter override, repeatable");
  payable_eval->add_option("--version", version, "report version (with --proposal)");
  payable_eval->add_flag("--explain", explain, "include the evaluation trace");
  payable_eval->callback([&] {
    action = [&] {
      if (proposal.empty() && program_file.empty()) throw Error(ErrorCode::invalid, "pass --program or --proposal");
      json body;
      if (!program_file.empty()) {
        const auto program = sla::parse(read_text(program_file));
        const auto m = assignments(metrics, "metric");
        const auto overrides = assignments(params, "param");
        const auto statement = sla::evaluate(program, m, overrides);
        body = {{"statement", sla::to_json(statement)}, {"payable_digest", sla::payable_digest(statement).hex()}};
        if (explain) body["trace"] = trace_json(sla::explain(program, m, overrides));
      } else {
        std::map<std::string, std::string> query;
        for (const auto& [name, value] : assignments(params, "param")) query["param." + name] = value.to_string();
        if (version) query["version"] = std::to_string(*version);
        const auto r = session.reader().get("/v1/proposals/" + digest_arg(proposal, "proposal id").hex() + "/payable", query);
        if (r.status != 200) return from_response(r);
        body = r.body;
        if (!explain) body.erase("trace");
      }
      std::string human = statement_human(body["statement"]);
      if (explain) {
        for (const auto& t : body["trace"]) {
          human += "  " + t["label"].get<std::string>() + " = " +
                   (t["value"].is_string() ? t["value"].get<std::string>() : t["value"].dump()) + "\n";
        }
      }
      return Outcome{ExitCode::ok, body, human};
    };
  });

  // timeline
  auto* timeline = app.add_subcommand("timeline", "show a proposal's event timeline");
  timeline->add_option("--proposal", proposal, "proposal id")->required();
  timeline->callback([&] {
    action = [&] {
      Outcome o = from_response(session.reader().get("/v1/proposals/" + digest_arg(proposal, "proposal id").hex() + "/timeline"));
      if (o.code == ExitCode::ok) {
        for (const auto& e : o.body["events"]) {
          o.human += std::to_string(e["seq"].get<std::uint64_t>()) + " " + e["timestamp"].get<std::string>() + " " +
                     e["kind"].get<std::string>() + " v" + std::to_string(e["version"].get<std::uint32_t>()) + " " +
                     e["actor"].get<std::string>() + "\n";
        }
      }
      return o;
    };
  });

  // verify chain | cert
  std::string file, anchors_file, cert_period;
  auto* verify = app.add_subcommand("verify", "verify the anchor chain or a certificate");
  verify->require_subcommand(1);
  auto* verify_chain = verify->add_subcommand("chain", "verify an anchor file, the store, or the service chain");
  verify_chain->add_option("--file", file, "anchor JSON Lines file");
  verify_chain->callback([&] {
    action = [&] {
      if (!file.empty()) {
        const std::string text = read_text(file);
        const auto v = ledger::verify_chain_jsonl(text);
        if (!v.ok) return chain_outcome(v, 0, {}, "file");
        const auto chain = ledger::AnchorChain::from_jsonl(text);
        return chain_outcome(v, chain.size(), chain.tip_digest(), "file");
      }
      if (!g.store.empty() && g.endpoint.empty()) return verify_store(g.store, session.curve_name());
      const auto r = session.reader().get("/v1/anchors");
      if (r.status != 200) return from_response(r);
      std::vector<ledger::AnchorBlock> blocks;
      try {
        blocks = blocks_from_json(r.body.at("blocks"));
      } catch (const Error& e) {
        return Outcome{ExitCode::verification, {{"ok", false}, {"source", "endpoint"}, {"reason", e.what()}}, {}};
      }
      const auto v = ledger::verify_chain(blocks);
      return chain_outcome(v, blocks.size(), blocks.empty() ? Digest{} : blocks.back().block_digest, "endpoint");
    };
  });
  auto* verify_cert = verify->add_subcommand("cert", "verify a certificate against the anchor chain");
  verify_cert->add_option("--file", file, "certificate JSON file");
  verify_cert->add_option("--contract", contract_id, "contract id (fetch from the service)");
  verify_cert->add_option("--period", cert_period, "period id (with --contract)");
  verify_cert->add_option("--anchors", anchors_file, "anchor JSON Lines file (default: from the service)");
  verify_cert->callback([&] {
    action = [&] {
      json cert_json;
      if (!file.empty()) {
        cert_json = read_json(file);
      } else {
        if (contract_id.empty() || cert_period.empty())
          throw Error(ErrorCode::invalid, "pass --file, or --contract with --period");
        const auto r = session.reader().get("/v1/contracts/" + digest_arg(contract_id, "contract id").hex() +
                                            "/certificates/" + cert_period);
        if (r.status != 200) return from_response(r);
        cert_json = r.body;
      }
      if (cert_json.contains("certificate")) cert_json = cert_json["certificate"];
      std::vector<ledger::AnchorBlock> blocks;
      if (!anchors_file.empty()) {
        blocks = ledger::AnchorChain::from_jsonl(read_text(anchors_file)).blocks();
      } else {
        const auto r = session.reader().get("/v1/anchors");
        if (r.status != 200) return from_response(r);
        blocks = blocks_from_json(r.body.at("blocks"));
      }
      const auto cert = consensus::certificate_from_json(cert_json);
      const auto verdict = consensus::verify_certificate(cert, blocks);
      const std::string digest = consensus::certificate_digest(cert).hex();
      if (!verdict.ok) {
        return Outcome{ExitCode::verification,
                       {{"ok", false}, {"certificate_digest", digest}, {"reason", verdict.reason}, {"detail", verdict.detail}},
                       "certificate rejected (" + verdict.reason + "): " + verdict.detail + "\n"};
      }
      return Outcome{ExitCode::ok,
                     {{"ok", true}, {"certificate_digest", digest}, {"payable", cert.payable.total.to_string()},
                      {"period_id", cert.period_id}, {"final_version", cert.final_version}},
                     "ok: payable " + cert.payable.total.to_string() + " for " + cert.period_id + "\n"};
    };
  });

  // anova
  std::string csv;
  auto* anova = app.add_subcommand("anova", "one-way ANOVA over labelled series");
  anova->add_option("--csv", csv, "CSV with header period,label,value")->required();
  anova->callback([&] {
    action = [&] {
      std::istringstream in(read_text(csv));
      const auto rows = analysis::read_series_csv(in);
      const auto groups = analysis::group_by_label(rows);
      const auto r = analysis::anova_oneway(groups);
      json labels = json::array();
      for (const auto& grp : groups) labels.push_back({{"label", grp.label}, {"count", grp.values.size()}});
      std::ostringstream human;
      human.precision(6);
      human << "F(" << r.df_between << ", " << r.df_within << ") = " << r.f_ratio << ", p = " << r.p_value << "\n";
      return Outcome{ExitCode::ok,
                     {{"f_ratio", r.f_ratio}, {"p_value", r.p_value}, {"df_between", r.df_between},
                      {"df_within", r.df_within}, {"groups", labels}},
                     human.str()};
    };
  });

  // overbilling
  std::vector<std::string> values;
  std::string legacy, automated;
  auto* overbilling = app.add_subcommand("overbilling", "overbilling reduction figures");
  auto* csv_opt = overbilling->add_option("--csv", csv, "CSV with header period,label,value");
  auto* value_opt = overbilling->add_option("--value", values, "reduction value, repeatable");
  auto* legacy_opt = overbilling->add_option("--legacy", legacy, "legacy billed amount");
  auto* automated_opt = overbilling->add_option("--automated", automated, "automated billed amount");
  legacy_opt->needs(automated_opt);
  automated_opt->needs(legacy_opt);
  csv_opt->excludes(value_opt)->excludes(legacy_opt);
  value_opt->excludes(legacy_opt);
  overbilling->callback([&] {
    action = [&] {
      if (!legacy.empty()) {
        const Decimal pct = sla::overbilling_pct(Decimal::parse(legacy), Decimal::parse(automated));
        return Outcome{ExitCode::ok, {{"overbilling_pct", pct.to_string()}}, pct.to_string() + "%\n"};
      }
      std::vector<Decimal> series;
      if (!csv.empty()) {
        std::istringstream in(read_text(csv));
        for (const auto& row : analysis::read_series_csv(in)) series.push_back(row.value);
      } else {
        for (const auto& v : values) series.push_back(Decimal::parse(v));
      }
      if (series.empty()) throw Error(ErrorCode::invalid, "pass --csv, --value, or --legacy with --automated");
      const auto s = analysis::summarize_overbilling(series);
      return Outcome{ExitCode::ok,
                     {{"mean", s.mean.to_string_fixed(4)}, {"count", s.count}, {"min", s.min.to_string()},
                      {"max", s.max.to_string()}},
                     "mean " + s.mean.to_string_fixed(4) + " over " + std::to_string(s.count) + " (min " +
                         s.min.to_string() + ", max " + s.max.to_string() + ")\n"};
    };
  });

  // serve
  std::string addr;
  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--addr", addr, "listen address host:port (AGS_ADDR, default 127.0.0.1:8080)");
  serve->callback([&] {
    action = [&] {
      if (addr.empty()) addr = env("AGS_ADDR").value_or("127.0.0.1:8080");
      const auto colon = addr.rfind(':');
      if (colon == std::string::npos) throw Error(ErrorCode::invalid, "address must be host:port");
      int port = 0;
      try {
        port = std::stoi(addr.substr(colon + 1));
      } catch (const std::exception&) {
        throw Error(ErrorCode::invalid, "bad port in " + addr);
      }
      if (g.store.empty()) err << "warning: no store given, state is kept in memory only\n";
      auto& svc = session.embedded();
      service::HttpServer http(svc);
      const int bound = http.bind(addr.substr(0, colon), port);
      err << "listening on " << addr.substr(0, colon) << ":" << bound << " (height " << svc.height() << ")\n";
      http.run();
      return Outcome{ExitCode::ok, {{"stopped", true}}, {}};
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ExitCode::ok;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return ExitCode::ok;
    }
    err << "error: " << e.what() << "\n";
    return ExitCode::usage;
  }

  Outcome outcome;
  try {
    session.apply_env();
    outcome = action();
  } catch (const Error& e) {
    outcome = {exit_for(e.code()), {{"error", std::string(to_string(e.code()))}, {"message", e.what()}},
               std::string("error: ") + e.what()};
  } catch (const std::exception& e) {
    outcome = {ExitCode::usage, {{"error", "invalid"}, {"message", e.what()}}, std::string("error: ") + e.what()};
  }

  if (g.json_out) {
    out << outcome.body.dump(2) << "\n";
  } else if (outcome.code == ExitCode::ok) {
    out << (outcome.human.empty() ? human_of(outcome.body) : outcome.human);
  } else {
    std::string message = outcome.human.empty() ? human_of(outcome.body) : outcome.human;
    if (message.back() != '\n') message += '\n';
    err << message;
  }
  return outcome.code;
}

}  // namespace ags::cli

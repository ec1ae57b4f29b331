#pragma once

#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>

#include <json.hpp>

#include "ags/error.hpp"
#include "ags/service/store.hpp"

namespace ags::service {

struct Request {
  std::string method;  // GET or POST
  std::string path;    // e.g. /v1/contracts/<id>
  std::map<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  nlohmann::json body;
};

int http_status(ErrorCode code);

struct Config {
  std::string store_path;  // empty: in-memory only
  std::string curve = "secp256k1";
  std::function<TimestampMs()> clock = now_ms;
};

// The event-sourced service. Opening replays the store (dropping an
// interrupted final write) and brings `<store>.anchors.jsonl` in line with
// the replayed chain; a store or anchor file that does not verify throws
// Error(corrupt). Requests are safe to issue from many threads: reads share
// a lock, mutations are serialized.
class Service {
 public:
  explicit Service(Config config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle(const Request& request);

  std::uint64_t height() const;
  std::string canonical_state() const;
  std::uint64_t last_nonce(const crypto::Address& actor) const;
  std::vector<ledger::AnchorBlock> anchor_blocks() const;
  const crypto::CurveParams& curve() const { return *curve_; }

  static std::string anchors_path(const std::string& store_path) { return store_path + ".anchors.jsonl"; }

 private:
  Response mutate(const std::string& action, const nlohmann::json& body, const std::function<void(const Envelope&)>& check);
  Response route(const Request& request);

  Config config_;
  const crypto::CurveParams* curve_;
  mutable std::shared_mutex mu_;
  State state_;
  std::FILE* store_ = nullptr;
  std::FILE* anchors_ = nullptr;
  bool failed_ = false;  // an append failed after the state changed; restart to recover
};

// HTTP front end. port 0 picks a free port.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  int bind(const std::string& host, int port);
  void run();  // blocks until stop()
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ags::service

#include <httplib.h>

#include "ags/service/service.hpp"

namespace ags::service {

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>()) {
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    Request request{req.method, req.path, {}, req.body};
    for (const auto& [key, value] : req.params) request.query[key] = value;
    const Response response = service.handle(request);
    res.status = response.status;
    res.set_content(response.body.dump(), "application/json");
  };
  impl_->server.Get(R"(/v1/.*)", handler);
  impl_->server.Post(R"(/v1/.*)", handler);
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::io, "cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace ags::service

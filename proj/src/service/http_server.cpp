#include "clarify/service/http_server.hpp"

#include <httplib.h>

#include "clarify/errors.hpp"

namespace clarify {

namespace {

void send(httplib::Response& res, const ServiceResponse& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

std::optional<nlohmann::json> parse_body(const httplib::Request& req, httplib::Response& res) {
  try {
    return nlohmann::json::parse(req.body.empty() ? std::string("{}") : req.body);
  } catch (const nlohmann::json::parse_error& e) {
    send(res, {400, {{"error", std::string("body is not valid JSON: ") + e.what()}}});
    return std::nullopt;
  }
}

}  // namespace

HttpServer::HttpServer(SessionService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                         {"Access-Control-Allow-Headers", "Content-Type"},
                         {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  s.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  s.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) send(res, service_.create(*body));
  });
  s.Post(R"(/sessions/([^/]+)/responses)", [this](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) send(res, service_.respond(req.matches[1].str(), *body));
  });
  s.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.get(req.matches[1].str()));
  });
  s.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
    send(res, service_.health());
  });
  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send(res, {500, {{"error", what}}});
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw ConfigError("cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::serve() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

bool HttpServer::running() const { return server_->is_running(); }

}  // namespace clarify

#pragma once

#include <memory>
#include <string>

#include "clarify/service/session_service.hpp"

namespace httplib {
class Server;
}

namespace clarify {

/// JSON API over a SessionService:
///   POST /sessions                   {"prompt": ...}
///   POST /sessions/{id}/responses    {"answers": {...}}
///   GET  /sessions/{id}
///   GET  /healthz
class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();

  /// Binds without serving. Port 0 picks a free port. Returns the bound
  /// port or throws ConfigError.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called. Call after bind().
  void serve();
  void stop();
  bool running() const;

 private:
  SessionService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace clarify

#pragma once

#include <functional>
#include <string>

#include "clarify/backend/transport.hpp"

namespace clarify {

/// POST <base_url>/v1/chat/completions. The bearer credential is read from
/// the environment variable named by BackendConfig::api_key_env on every
/// call; it is never stored in config files.
class HttpTransport final : public Transport {
 public:
  using EnvLookup = std::function<std::string(const std::string&)>;

  HttpTransport();
  explicit HttpTransport(EnvLookup env);

  AttemptResult send(const BackendConfig& config, const ChatRequest& request) override;

 private:
  EnvLookup env_;
};

struct ParsedUrl {
  std::string scheme_host_port;  // e.g. "http://127.0.0.1:8080"
  std::string path_prefix;       // without trailing slash, may be empty
};

/// Throws ConfigError unless the URL is http:// or https://.
ParsedUrl parse_base_url(const std::string& base_url);

}  // namespace clarify

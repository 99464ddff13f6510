#include "clarify/backend/http_transport.hpp"

#include <cstdlib>

#include <httplib.h>

#include "clarify/backend/wire.hpp"
#include "clarify/errors.hpp"

namespace clarify {

namespace {

std::string getenv_or_empty(const std::string& name) {
  if (name.empty()) return {};
  const char* v = std::getenv(name.c_str());
  return v ? std::string(v) : std::string{};
}

std::optional<std::chrono::milliseconds> parse_retry_after(const httplib::Result& res) {
  if (!res->has_header("Retry-After")) return std::nullopt;
  const auto value = res->get_header_value("Retry-After");
  char* end = nullptr;
  const double seconds = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || seconds < 0) return std::nullopt;
  return std::chrono::milliseconds{static_cast<std::int64_t>(seconds * 1000.0)};
}

}  // namespace

ParsedUrl parse_base_url(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base_url lacks a scheme: " + base_url);
  const auto scheme = base_url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ConfigError("base_url must be http:// or https://: " + base_url);
  }
  const auto path_start = base_url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.scheme_host_port = base_url.substr(0, path_start);
  if (path_start != std::string::npos) {
    out.path_prefix = base_url.substr(path_start);
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  }
  if (out.scheme_host_port.size() <= scheme_end + 3) throw ConfigError("base_url lacks a host");
  return out;
}

HttpTransport::HttpTransport() : env_(getenv_or_empty) {}

HttpTransport::HttpTransport(EnvLookup env) : env_(std::move(env)) {}

AttemptResult HttpTransport::send(const BackendConfig& config, const ChatRequest& request) {
  const auto url = parse_base_url(config.base_url);
  httplib::Client cli(url.scheme_host_port);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - secs);
  cli.set_connection_timeout(secs.count(), usecs.count());
  cli.set_read_timeout(secs.count(), usecs.count());
  cli.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  const auto key = env_(config.api_key_env);
  if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);

  const auto body = wire::encode_request(config, request).dump();
  const auto path = url.path_prefix + std::string(wire::kCompletionsPath);
  auto res = cli.Post(path, headers, body, "application/json");
  if (!res) {
    const auto err = res.error();
    const auto kind = err == httplib::Error::Read || err == httplib::Error::Write
                          ? AttemptFailure::Timeout
                          : AttemptFailure::Connection;
    return AttemptResult::fail(kind, httplib::to_string(err));
  }
  const int status = res->status;
  if (status == 200) {
    try {
      return AttemptResult::ok(wire::decode_response(std::string_view(res->body)));
    } catch (const InvalidResponse& e) {
      return AttemptResult::fail(AttemptFailure::Invalid, e.what(), status);
    }
  }
  AttemptFailure kind = AttemptFailure::Rejected;
  if (status == 429) {
    kind = AttemptFailure::RateLimited;
  } else if (status >= 500 || status == 408) {
    kind = AttemptFailure::ServerError;
  }
  auto result = AttemptResult::fail(kind, "HTTP " + std::to_string(status), status);
  result.retry_after = parse_retry_after(res);
  return result;
}

}  // namespace clarify

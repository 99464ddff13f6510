#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "clarify/backend/types.hpp"

namespace clarify {

enum class AttemptFailure {
  Timeout,
  Connection,
  RateLimited,  // HTTP 429
  ServerError,  // HTTP 5xx, 408
  Rejected,     // other HTTP 4xx
  Invalid,      // unparseable payload
};

bool is_transient(AttemptFailure failure);
std::string_view to_string(AttemptFailure failure);

struct AttemptReply {
  std::string text;
  std::optional<std::vector<TokenLogProb>> token_logprobs;
};

/// Outcome of exactly one network (or stub) attempt. Retry policy lives in
/// ChatClient, not here.
struct AttemptResult {
  std::optional<AttemptReply> reply;
  AttemptFailure failure = AttemptFailure::Invalid;
  int http_status = 0;
  std::string detail;
  std::optional<std::chrono::milliseconds> retry_after;

  static AttemptResult ok(AttemptReply reply);
  static AttemptResult fail(AttemptFailure failure, std::string detail, int http_status = 0);
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual AttemptResult send(const BackendConfig& config, const ChatRequest& request) = 0;
};

}  // namespace clarify

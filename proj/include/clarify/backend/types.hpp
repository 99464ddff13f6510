#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace clarify {

struct BackendConfig {
  std::string base_url;
  std::string model_name;
  std::chrono::milliseconds timeout{std::chrono::seconds{120}};
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{std::chrono::seconds{1}};
  std::chrono::milliseconds backoff_cap{std::chrono::seconds{60}};
  int requests_per_minute = 60;
  std::string api_key_env;

  /// Throws PreconditionError when timeout <= 0, max_retries < 0 or
  /// requests_per_minute <= 0.
  void validate() const;
};

enum class ChatRole { System, User, Assistant };

struct ChatMessage {
  ChatRole role = ChatRole::User;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_output_tokens = 1024;
  bool want_logprobs = false;
  // Caller-side tag for logs and scripted stubs; never sent on the wire.
  std::string correlation_id;

  /// Throws PreconditionError if messages are empty, the last message is
  /// from the assistant, temperature < 0 or max_output_tokens <= 0.
  void validate() const;

  /// Content of the last user message, or empty.
  const std::string& last_user_content() const;
};

struct TokenLogProb {
  std::string token;
  double logprob = 0.0;  // natural log, <= 0

  friend bool operator==(const TokenLogProb&, const TokenLogProb&) = default;
};

struct ChatCompletion {
  std::string text;
  std::optional<std::vector<TokenLogProb>> token_logprobs;
  std::chrono::microseconds latency{0};
  int attempts = 1;
};

std::string_view to_string(ChatRole role);
ChatRole role_from_string(std::string_view s);

/// Convenience for the common system + user request shape.
ChatRequest make_request(std::string user_content, std::string system_preamble = {});

}  // namespace clarify

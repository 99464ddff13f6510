#include "clarify/backend/wire.hpp"

#include "clarify/errors.hpp"

namespace clarify {

using nlohmann::json;

void BackendConfig::validate() const {
  if (timeout.count() <= 0) throw PreconditionError("backend timeout must be > 0");
  if (max_retries < 0) throw PreconditionError("max_retries must be >= 0");
  if (requests_per_minute <= 0) throw PreconditionError("requests_per_minute must be > 0");
  if (backoff_base.count() < 0) throw PreconditionError("backoff_base must be >= 0");
}

void ChatRequest::validate() const {
  if (messages.empty()) throw PreconditionError("chat request has no messages");
  if (messages.back().role == ChatRole::Assistant) {
    throw PreconditionError("last chat message must be from user or system");
  }
  if (temperature < 0) throw PreconditionError("temperature must be >= 0");
  if (max_output_tokens <= 0) throw PreconditionError("max_output_tokens must be > 0");
}

const std::string& ChatRequest::last_user_content() const {
  static const std::string empty;
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == ChatRole::User) return it->content;
  }
  return empty;
}

std::string_view to_string(ChatRole role) {
  switch (role) {
    case ChatRole::System: return "system";
    case ChatRole::User: return "user";
    case ChatRole::Assistant: return "assistant";
  }
  return "user";
}

ChatRole role_from_string(std::string_view s) {
  if (s == "system") return ChatRole::System;
  if (s == "user") return ChatRole::User;
  if (s == "assistant") return ChatRole::Assistant;
  throw PreconditionError("unknown chat role: " + std::string(s));
}

ChatRequest make_request(std::string user_content, std::string system_preamble) {
  ChatRequest r;
  if (!system_preamble.empty()) r.messages.push_back({ChatRole::System, std::move(system_preamble)});
  r.messages.push_back({ChatRole::User, std::move(user_content)});
  return r;
}

bool is_transient(AttemptFailure failure) {
  switch (failure) {
    case AttemptFailure::Timeout:
    case AttemptFailure::Connection:
    case AttemptFailure::RateLimited:
    case AttemptFailure::ServerError:
      return true;
    case AttemptFailure::Rejected:
    case AttemptFailure::Invalid:
      return false;
  }
  return false;
}

std::string_view to_string(AttemptFailure failure) {
  switch (failure) {
    case AttemptFailure::Timeout: return "timeout";
    case AttemptFailure::Connection: return "connection";
    case AttemptFailure::RateLimited: return "rate_limited";
    case AttemptFailure::ServerError: return "server_error";
    case AttemptFailure::Rejected: return "rejected";
    case AttemptFailure::Invalid: return "invalid";
  }
  return "invalid";
}

AttemptResult AttemptResult::ok(AttemptReply reply) {
  AttemptResult r;
  r.reply = std::move(reply);
  r.http_status = 200;
  return r;
}

AttemptResult AttemptResult::fail(AttemptFailure failure, std::string detail, int http_status) {
  AttemptResult r;
  r.failure = failure;
  r.detail = std::move(detail);
  r.http_status = http_status;
  return r;
}

namespace wire {

json encode_request(const BackendConfig& config, const ChatRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  json body = {{"model", config.model_name},
               {"messages", messages},
               {"temperature", request.temperature},
               {"max_tokens", request.max_output_tokens}};
  if (request.want_logprobs) body["logprobs"] = true;
  return body;
}

ChatRequest decode_request(const json& body) {
  ChatRequest r;
  for (const auto& m : body.at("messages")) {
    r.messages.push_back({role_from_string(m.at("role").get<std::string>()),
                          m.at("content").get<std::string>()});
  }
  r.temperature = body.value("temperature", 0.0);
  r.max_output_tokens = body.value("max_tokens", 1024);
  r.want_logprobs = body.value("logprobs", false);
  return r;
}

AttemptReply decode_response(const json& body) {
  try {
    const auto& choice = body.at("choices").at(0);
    AttemptReply reply;
    const auto& content = choice.at("message").at("content");
    reply.text = content.is_null() ? std::string{} : content.get<std::string>();
    if (choice.contains("logprobs") && choice["logprobs"].is_object() &&
        choice["logprobs"].contains("content") && choice["logprobs"]["content"].is_array()) {
      std::vector<TokenLogProb> lps;
      for (const auto& t : choice["logprobs"]["content"]) {
        TokenLogProb lp{t.at("token").get<std::string>(), t.at("logprob").get<double>()};
        if (lp.logprob > 0.0) {
          throw InvalidResponse("backend returned positive logprob for token '" + lp.token + "'");
        }
        lps.push_back(std::move(lp));
      }
      reply.token_logprobs = std::move(lps);
    }
    return reply;
  } catch (const json::exception& e) {
    throw InvalidResponse(std::string("malformed chat completion: ") + e.what());
  }
}

AttemptReply decode_response(std::string_view body) {
  json parsed;
  try {
    parsed = json::parse(body);
  } catch (const json::parse_error& e) {
    throw InvalidResponse(std::string("chat completion is not JSON: ") + e.what());
  }
  return decode_response(parsed);
}

json encode_response(const AttemptReply& reply, std::string_view model) {
  json choice = {{"index", 0},
                 {"message", {{"role", "assistant"}, {"content", reply.text}}},
                 {"finish_reason", "stop"}};
  if (reply.token_logprobs) {
    json content = json::array();
    for (const auto& t : *reply.token_logprobs) {
      content.push_back({{"token", t.token}, {"logprob", t.logprob}});
    }
    choice["logprobs"] = {{"content", content}};
  }
  return {{"object", "chat.completion"}, {"model", model}, {"choices", json::array({choice})}};
}

}  // namespace wire
}  // namespace clarify

#pragma once

#include <nlohmann/json.hpp>

#include "clarify/backend/transport.hpp"
#include "clarify/backend/types.hpp"

namespace clarify::wire {

inline constexpr std::string_view kCompletionsPath = "/v1/chat/completions";

/// Chat-completions request body:
///   {"model", "messages":[{"role","content"}], "temperature", "max_tokens",
///    "logprobs"}
nlohmann::json encode_request(const BackendConfig& config, const ChatRequest& request);

/// Inverse of encode_request (used by test servers and the stub backend).
ChatRequest decode_request(const nlohmann::json& body);

/// Reads choices[0].message.content and, when present,
/// choices[0].logprobs.content[i].{token, logprob}. Throws InvalidResponse
/// on a missing field or a positive log-probability.
AttemptReply decode_response(const nlohmann::json& body);
AttemptReply decode_response(std::string_view body);

/// Builds a response body in the same shape (for fakes and stubs).
nlohmann::json encode_response(const AttemptReply& reply, std::string_view model = "stub");

}  // namespace clarify::wire

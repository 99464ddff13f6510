#pragma once

#include <nlohmann/json.hpp>

#include "clarify/core/state_machine.hpp"
#include "clarify/core/types.hpp"

namespace clarify {

// JSON encodings for the domain layer. Object keys are emitted sorted, so
// `dump()` of any of these is a canonical serialization.

nlohmann::json to_json(const UserPrompt& prompt);
nlohmann::json to_json(const ClarityAssessment& assessment);
nlohmann::json to_json(const ClarificationSet& set);
nlohmann::json to_json(const ClarificationResponses& responses);
nlohmann::json to_json(const StageTiming& timing);
nlohmann::json to_json(const SessionLimits& limits);
nlohmann::json to_json(const DialogueState& state);
nlohmann::json to_json(const PipelineEvent& event);

UserPrompt prompt_from_json(const nlohmann::json& j);
ClarityAssessment assessment_from_json(const nlohmann::json& j);
ClarificationSet clarification_from_json(const nlohmann::json& j);
ClarificationResponses responses_from_json(const nlohmann::json& j);
StageTiming timing_from_json(const nlohmann::json& j);
SessionLimits limits_from_json(const nlohmann::json& j);
DialogueState state_from_json(const nlohmann::json& j);
PipelineEvent event_from_json(const nlohmann::json& j);

/// Byte string used for crash/replay equivalence checks.
std::string canonical(const DialogueState& state);

}  // namespace clarify

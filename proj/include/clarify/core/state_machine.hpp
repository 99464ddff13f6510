#pragma once

#include <optional>
#include <string>
#include <variant>

#include "clarify/core/types.hpp"

namespace clarify {

namespace events {

struct PromptSubmitted {
  UserPrompt prompt;
  SessionLimits limits;
  friend bool operator==(const PromptSubmitted&, const PromptSubmitted&) = default;
};

struct Classified {
  ClarityAssessment assessment;
  friend bool operator==(const Classified&, const Classified&) = default;
};

struct QuestionsGenerated {
  ClarificationSet clarification;
  friend bool operator==(const QuestionsGenerated&,
                         const QuestionsGenerated&) = default;
};

struct UserResponded {
  ClarificationResponses responses;
  friend bool operator==(const UserResponded&, const UserResponded&) = default;
};

struct AnswerProduced {
  std::string text;
  friend bool operator==(const AnswerProduced&, const AnswerProduced&) = default;
};

enum class ThresholdReason { MaxRounds, NoQuestions };

/// Stop clarifying and answer on the context collected so far.
struct ThresholdReached {
  ThresholdReason reason = ThresholdReason::MaxRounds;
  friend bool operator==(const ThresholdReached&,
                         const ThresholdReached&) = default;
};

struct BackendFailed {
  Stage stage = Stage::Classify;
  std::string message;
  friend bool operator==(const BackendFailed&, const BackendFailed&) = default;
};

}  // namespace events

using EventPayload =
    std::variant<events::PromptSubmitted, events::Classified,
                 events::QuestionsGenerated, events::UserResponded,
                 events::AnswerProduced, events::ThresholdReached,
                 events::BackendFailed>;

/// One step of the pipeline. `timing` records the stage call that produced
/// the event, if any, and is appended to the state's stage_timings.
struct PipelineEvent {
  EventPayload payload;
  std::optional<StageTiming> timing;

  friend bool operator==(const PipelineEvent&, const PipelineEvent&) = default;
};

std::string_view event_name(const EventPayload& payload);
std::string_view to_string(events::ThresholdReason reason);
events::ThresholdReason threshold_reason_from_string(std::string_view s);

/// The session state machine:
///
///   New --PromptSubmitted--> AwaitingClassification
///   AwaitingClassification --Classified(Answer)--> Answering
///   AwaitingClassification --Classified(Clarify)--> AwaitingClassification
///       (round pending) --QuestionsGenerated--> AwaitingUserClarification
///   AwaitingUserClarification --UserResponded--> AwaitingClassification
///   AwaitingClassification (round pending) --ThresholdReached--> Answering
///   Answering --AnswerProduced--> Answered
///   any non-terminal --BackendFailed--> Aborted
///
/// Pure; throws IllegalTransition for any other pair or for payloads that
/// would break a DialogueState invariant.
DialogueState transition(const DialogueState& state, const PipelineEvent& event);

/// Non-throwing probe for the same rules.
bool can_transition(const DialogueState& state, const PipelineEvent& event);

/// Throws IllegalTransition if a DialogueState invariant does not hold.
void check_invariants(const DialogueState& state);

}  // namespace clarify

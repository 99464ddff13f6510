#pragma once

#include <functional>
#include <memory>
#include <string>

#include "clarify/answering/answering.hpp"
#include "clarify/backend/clock.hpp"
#include "clarify/classifier/classifier.hpp"
#include "clarify/core/state_machine.hpp"
#include "clarify/engine/clarifier.hpp"

namespace clarify {

struct PipelineDeps {
  ClassifierBinding classifier;
  ClarifierBinding clarifier;
  AnswererBinding answerer;
  SessionLimits limits;
  std::shared_ptr<Clock> clock;  // stage timing and timestamps; defaults to real_clock()
};

/// Observer for every applied event, called after the transition with the
/// resulting state. Persistence hooks in here; an exception aborts the step.
using EventSink = std::function<void(const PipelineEvent& event, const DialogueState& after)>;

/// Answers for one question set; may cover any subset of its questions.
using RespondFn = std::function<ClarificationResponses(const ClarificationSet& questions)>;

/// Drives sessions through classify -> (clarify -> user -> classify)* ->
/// answer. Stateless between calls; every step goes through transition().
class Pipeline {
 public:
  /// Copies limits.clear_min_level and max_questions_per_round into the
  /// bindings, then validates everything. Throws ConfigError.
  explicit Pipeline(PipelineDeps deps);

  /// Submits the prompt and runs until questions are pending or the session
  /// is finished.
  DialogueState start(std::string session_id, UserPrompt prompt, const EventSink& sink = {}) const;

  /// Folds user answers into a session awaiting clarification and resumes.
  /// Blank answers count as skipped. Throws IllegalTransition for a wrong
  /// status or unknown question id.
  DialogueState respond(const DialogueState& state, ClarificationResponses responses,
                        const EventSink& sink = {}) const;

  /// Runs backend stages until the session needs user input or finishes.
  /// Backend failures become BackendFailed (status Aborted).
  DialogueState advance(DialogueState state, const EventSink& sink = {}) const;

  const PipelineDeps& deps() const { return deps_; }

 private:
  DialogueState apply(const DialogueState& state, PipelineEvent event, const EventSink& sink) const;
  DialogueState step(const DialogueState& state, const EventSink& sink) const;

  PipelineDeps deps_;
};

/// Runs one whole session, calling `respond` for each question set.
/// Terminates in Answered or Aborted within limits.max_rounds rounds.
DialogueState run_session(const Pipeline& pipeline, UserPrompt prompt, const RespondFn& respond,
                          const EventSink& sink = {}, std::string session_id = "session");

/// True when the last round was classified Clarify and awaits questions or a
/// threshold decision.
bool awaiting_questions(const DialogueState& state);

}  // namespace clarify

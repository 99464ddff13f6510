#include "clarify/engine/pipeline.hpp"

#include "clarify/core/transcript.hpp"
#include "clarify/errors.hpp"

namespace clarify {

namespace {

std::chrono::microseconds since(const Clock& clock, Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::microseconds>(clock.now() - t0);
}

}  // namespace

bool awaiting_questions(const DialogueState& s) {
  return s.status == SessionStatus::AwaitingClassification && !s.rounds.empty() &&
         !s.rounds.back().clarification;
}

Pipeline::Pipeline(PipelineDeps deps) : deps_(std::move(deps)) {
  if (!deps_.clock) deps_.clock = real_clock();
  try {
    deps_.limits.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  deps_.classifier.clear_min_level = deps_.limits.clear_min_level;
  deps_.clarifier.max_questions_per_round = deps_.limits.max_questions_per_round;
  deps_.classifier.validate();
  deps_.clarifier.validate();
  deps_.answerer.validate();
}

DialogueState Pipeline::apply(const DialogueState& state, PipelineEvent event,
                              const EventSink& sink) const {
  auto next = transition(state, event);
  if (sink) sink(event, next);
  return next;
}

DialogueState Pipeline::start(std::string session_id, UserPrompt prompt,
                              const EventSink& sink) const {
  auto state = DialogueState::fresh(std::move(session_id));
  state = apply(state, {events::PromptSubmitted{std::move(prompt), deps_.limits}, std::nullopt},
                sink);
  return advance(std::move(state), sink);
}

DialogueState Pipeline::respond(const DialogueState& state, ClarificationResponses responses,
                                const EventSink& sink) const {
  std::erase_if(responses.answers, [](const auto& kv) {
    return kv.second.find_first_not_of(" \t\r\n") == std::string::npos;
  });
  auto next = apply(state, {events::UserResponded{std::move(responses)}, std::nullopt}, sink);
  return advance(std::move(next), sink);
}

DialogueState Pipeline::step(const DialogueState& state, const EventSink& sink) const {
  const auto& clock = *deps_.clock;
  const auto t0 = clock.now();
  auto timed = [&](Stage stage) { return StageTiming{stage, since(clock, t0)}; };

  if (state.status == SessionStatus::Answering) {
    try {
      auto text = answer(deps_.answerer, assemble_context(state));
      return apply(state, {events::AnswerProduced{std::move(text)}, timed(Stage::Answer)}, sink);
    } catch (const BackendError& e) {
      return apply(state, {events::BackendFailed{Stage::Answer, e.what()}, timed(Stage::Answer)},
                   sink);
    }
  }

  if (awaiting_questions(state)) {
    if (state.round_count >= state.limits.max_rounds) {
      return apply(state, {events::ThresholdReached{events::ThresholdReason::MaxRounds}, std::nullopt},
                   sink);
    }
    try {
      auto set = generate_questions(deps_.clarifier, assemble_context(state), state.round_count + 1,
                                    clock.wall_now());
      return apply(state, {events::QuestionsGenerated{std::move(set)}, timed(Stage::Clarify)}, sink);
    } catch (const NoQuestionsParsed&) {
      return apply(state,
                   {events::ThresholdReached{events::ThresholdReason::NoQuestions},
                    timed(Stage::Clarify)},
                   sink);
    } catch (const BackendError& e) {
      return apply(state, {events::BackendFailed{Stage::Clarify, e.what()}, timed(Stage::Clarify)},
                   sink);
    }
  }

  try {
    auto assessment = classify(deps_.classifier, assemble_context(state), state.classify_calls());
    return apply(state, {events::Classified{assessment}, timed(Stage::Classify)}, sink);
  } catch (const BackendError& e) {
    return apply(state, {events::BackendFailed{Stage::Classify, e.what()}, timed(Stage::Classify)},
                 sink);
  }
}

DialogueState Pipeline::advance(DialogueState state, const EventSink& sink) const {
  if (state.status == SessionStatus::New) {
    throw PreconditionError("advance: session has no prompt yet");
  }
  while (state.status == SessionStatus::AwaitingClassification ||
         state.status == SessionStatus::Answering) {
    state = step(state, sink);
  }
  return state;
}

DialogueState run_session(const Pipeline& pipeline, UserPrompt prompt, const RespondFn& respond,
                          const EventSink& sink, std::string session_id) {
  auto state = pipeline.start(std::move(session_id), std::move(prompt), sink);
  while (const auto* pending = state.pending_questions()) {
    auto responses = respond(*pending);
    responses.round_index = pending->round_index;
    state = pipeline.respond(state, std::move(responses), sink);
  }
  return state;
}

}  // namespace clarify

#include "clarify/core/state_machine.hpp"

#include <set>

#include "clarify/errors.hpp"

namespace clarify {

namespace {

[[noreturn]] void reject(const DialogueState& state, std::string_view event,
                         std::string_view why) {
  throw IllegalTransition("illegal transition: " + std::string(event) +
                          " in state " + std::string(to_string(state.status)) +
                          ": " + std::string(why));
}

// The last round holds a Clarify assessment that has not yet been followed
// by questions or a threshold decision.
bool has_pending_round(const DialogueState& s) {
  return s.status == SessionStatus::AwaitingClassification && !s.rounds.empty() &&
         !s.rounds.back().clarification;
}

std::set<std::string> question_ids(const DialogueState& s) {
  std::set<std::string> ids;
  for (const auto& r : s.rounds) {
    if (!r.clarification) continue;
    for (const auto& q : r.clarification->questions) ids.insert(q.id);
  }
  return ids;
}

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

struct Apply {
  const DialogueState& before;
  DialogueState& s;

  void operator()(const events::PromptSubmitted& e) const {
    if (s.status != SessionStatus::New) reject(before, "PromptSubmitted", "session already has a prompt");
    if (blank(e.prompt.text)) reject(before, "PromptSubmitted", "empty prompt");
    try {
      e.limits.validate();
    } catch (const PreconditionError& err) {
      reject(before, "PromptSubmitted", err.what());
    }
    s.prompt = e.prompt;
    s.limits = e.limits;
    s.status = SessionStatus::AwaitingClassification;
  }

  void operator()(const events::Classified& e) const {
    if (s.status != SessionStatus::AwaitingClassification) {
      reject(before, "Classified", "not awaiting classification");
    }
    if (has_pending_round(s)) reject(before, "Classified", "round already classified");
    if (e.assessment.route != route_for(e.assessment.level, s.limits.clear_min_level)) {
      reject(before, "Classified", "route disagrees with clear_min_level");
    }
    s.rounds.push_back(Round{e.assessment, std::nullopt, std::nullopt});
    if (e.assessment.route == Route::Answer) s.status = SessionStatus::Answering;
  }

  void operator()(const events::QuestionsGenerated& e) const {
    if (!has_pending_round(s)) reject(before, "QuestionsGenerated", "no round awaiting questions");
    if (s.rounds.back().assessment.route != Route::Clarify) {
      reject(before, "QuestionsGenerated", "round was routed to answer");
    }
    if (s.round_count >= s.limits.max_rounds) {
      reject(before, "QuestionsGenerated", "max_rounds reached");
    }
    const auto& set = e.clarification;
    if (set.round_index != s.round_count + 1) {
      reject(before, "QuestionsGenerated", "round_index out of sequence");
    }
    const auto n = static_cast<int>(set.questions.size());
    if (n < 1 || n > s.limits.max_questions_per_round) {
      reject(before, "QuestionsGenerated", "question count out of range");
    }
    auto seen = question_ids(s);
    for (const auto& q : set.questions) {
      if (q.id.empty() || blank(q.text)) reject(before, "QuestionsGenerated", "empty question");
      if (!seen.insert(q.id).second) reject(before, "QuestionsGenerated", "duplicate question id " + q.id);
    }
    s.rounds.back().clarification = set;
    ++s.round_count;
    s.status = SessionStatus::AwaitingUserClarification;
  }

  void operator()(const events::UserResponded& e) const {
    if (s.status != SessionStatus::AwaitingUserClarification) {
      reject(before, "UserResponded", "no questions pending");
    }
    const auto& set = *s.rounds.back().clarification;
    if (e.responses.round_index != set.round_index) {
      reject(before, "UserResponded", "responses target another round");
    }
    for (const auto& [id, text] : e.responses.answers) {
      if (set.find(id) == nullptr) reject(before, "UserResponded", "unknown question id " + id);
    }
    s.rounds.back().responses = e.responses;
    s.status = SessionStatus::AwaitingClassification;
  }

  void operator()(const events::AnswerProduced& e) const {
    if (s.status != SessionStatus::Answering) reject(before, "AnswerProduced", "not answering");
    s.final_answer = e.text;
    s.status = SessionStatus::Answered;
  }

  void operator()(const events::ThresholdReached& e) const {
    if (!has_pending_round(s)) reject(before, "ThresholdReached", "no unclear round pending");
    if (e.reason == events::ThresholdReason::MaxRounds &&
        s.round_count < s.limits.max_rounds) {
      reject(before, "ThresholdReached", "rounds remain below max_rounds");
    }
    s.status = SessionStatus::Answering;
  }

  void operator()(const events::BackendFailed& e) const {
    if (is_terminal(s.status)) reject(before, "BackendFailed", "session already finished");
    s.failure = std::string(to_string(e.stage)) + ": " + e.message;
    s.status = SessionStatus::Aborted;
  }
};

}  // namespace

std::string_view event_name(const EventPayload& payload) {
  struct Name {
    std::string_view operator()(const events::PromptSubmitted&) const { return "prompt_submitted"; }
    std::string_view operator()(const events::Classified&) const { return "classified"; }
    std::string_view operator()(const events::QuestionsGenerated&) const { return "questions_generated"; }
    std::string_view operator()(const events::UserResponded&) const { return "user_responded"; }
    std::string_view operator()(const events::AnswerProduced&) const { return "answer_produced"; }
    std::string_view operator()(const events::ThresholdReached&) const { return "threshold_reached"; }
    std::string_view operator()(const events::BackendFailed&) const { return "backend_failed"; }
  };
  return std::visit(Name{}, payload);
}

std::string_view to_string(events::ThresholdReason reason) {
  return reason == events::ThresholdReason::MaxRounds ? "max_rounds" : "no_questions";
}

events::ThresholdReason threshold_reason_from_string(std::string_view s) {
  if (s == "max_rounds") return events::ThresholdReason::MaxRounds;
  if (s == "no_questions") return events::ThresholdReason::NoQuestions;
  throw PreconditionError("unknown threshold reason: " + std::string(s));
}

DialogueState transition(const DialogueState& state, const PipelineEvent& event) {
  DialogueState next = state;
  std::visit(Apply{state, next}, event.payload);
  if (event.timing) next.stage_timings.push_back(*event.timing);
  return next;
}

bool can_transition(const DialogueState& state, const PipelineEvent& event) {
  try {
    (void)transition(state, event);
    return true;
  } catch (const IllegalTransition&) {
    return false;
  }
}

void check_invariants(const DialogueState& s) {
  auto fail = [](const std::string& why) {
    throw IllegalTransition("invariant violated: " + why);
  };
  if (s.status == SessionStatus::New) {
    if (s.prompt || !s.rounds.empty()) fail("new session carries dialogue");
    return;
  }
  if (!s.prompt) {
    // Only a session that failed before its prompt was recorded.
    if (s.status != SessionStatus::Aborted || !s.rounds.empty()) fail("missing prompt");
    return;
  }
  if (blank(s.prompt->text)) fail("missing prompt");

  int with_questions = 0;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < s.rounds.size(); ++i) {
    const auto& r = s.rounds[i];
    const bool last = i + 1 == s.rounds.size();
    if (r.assessment.route != route_for(r.assessment.level, s.limits.clear_min_level)) {
      fail("route inconsistent with level");
    }
    if (!r.clarification) {
      if (!last) fail("round without questions before the last round");
      if (r.responses) fail("responses without questions");
      continue;
    }
    ++with_questions;
    const auto n = static_cast<int>(r.clarification->questions.size());
    if (n < 1 || n > s.limits.max_questions_per_round) fail("question count");
    if (r.clarification->round_index != with_questions) fail("round_index sequence");
    for (const auto& q : r.clarification->questions) {
      if (!ids.insert(q.id).second) fail("duplicate question id");
    }
    if (r.responses) {
      if (r.responses->round_index != r.clarification->round_index) fail("responses round");
      for (const auto& [id, text] : r.responses->answers) {
        if (!r.clarification->find(id)) fail("response to unknown question");
      }
    } else if (!last) {
      fail("unanswered round before the last round");
    }
  }
  if (with_questions != s.round_count) fail("round_count mismatch");
  if (s.round_count > s.limits.max_rounds) fail("round_count exceeds max_rounds");
  if (s.status == SessionStatus::Answered && !s.final_answer) fail("answered without answer");
  if (s.status == SessionStatus::AwaitingUserClarification) {
    if (s.rounds.empty() || !s.rounds.back().clarification || s.rounds.back().responses) {
      fail("awaiting user without open questions");
    }
  }
}

}  // namespace clarify

#include "clarify/core/serialization.hpp"

#include "clarify/errors.hpp"

namespace clarify {

using nlohmann::json;

namespace {

std::int64_t to_ms(Timestamp t) { return t.time_since_epoch().count(); }
Timestamp from_ms(std::int64_t ms) { return Timestamp{std::chrono::milliseconds{ms}}; }

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? to_json(*v) : json(nullptr);
}

}  // namespace

json to_json(const UserPrompt& p) {
  return {{"text", p.text},
          {"contains_code", p.contains_code},
          {"submitted_at", to_ms(p.submitted_at)}};
}

json to_json(const ClarityAssessment& a) {
  return {{"level", a.level.value()},
          {"route", to_string(a.route)},
          {"source", to_string(a.source)}};
}

json to_json(const ClarificationSet& set) {
  json qs = json::array();
  for (const auto& q : set.questions) qs.push_back({{"id", q.id}, {"text", q.text}});
  return {{"questions", qs},
          {"generated_at", to_ms(set.generated_at)},
          {"round_index", set.round_index}};
}

json to_json(const ClarificationResponses& r) {
  return {{"answers", r.answers}, {"round_index", r.round_index}};
}

json to_json(const StageTiming& t) {
  return {{"stage", to_string(t.stage)}, {"duration_us", t.duration.count()}};
}

json to_json(const SessionLimits& l) {
  return {{"max_rounds", l.max_rounds},
          {"clear_min_level", l.clear_min_level},
          {"max_questions_per_round", l.max_questions_per_round}};
}

json to_json(const DialogueState& s) {
  json rounds = json::array();
  for (const auto& r : s.rounds) {
    rounds.push_back({{"assessment", to_json(r.assessment)},
                      {"clarification", optional_json(r.clarification)},
                      {"responses", optional_json(r.responses)}});
  }
  json timings = json::array();
  for (const auto& t : s.stage_timings) timings.push_back(to_json(t));
  return {{"session_id", s.session_id},
          {"prompt", optional_json(s.prompt)},
          {"limits", to_json(s.limits)},
          {"rounds", rounds},
          {"round_count", s.round_count},
          {"status", to_string(s.status)},
          {"final_answer", s.final_answer ? json(*s.final_answer) : json(nullptr)},
          {"failure", s.failure ? json(*s.failure) : json(nullptr)},
          {"stage_timings", timings}};
}

json to_json(const PipelineEvent& e) {
  struct Payload {
    json operator()(const events::PromptSubmitted& p) const {
      return {{"prompt", to_json(p.prompt)}, {"limits", to_json(p.limits)}};
    }
    json operator()(const events::Classified& p) const {
      return {{"assessment", to_json(p.assessment)}};
    }
    json operator()(const events::QuestionsGenerated& p) const {
      return {{"clarification", to_json(p.clarification)}};
    }
    json operator()(const events::UserResponded& p) const {
      return {{"responses", to_json(p.responses)}};
    }
    json operator()(const events::AnswerProduced& p) const { return {{"text", p.text}}; }
    json operator()(const events::ThresholdReached& p) const {
      return {{"reason", to_string(p.reason)}};
    }
    json operator()(const events::BackendFailed& p) const {
      return {{"stage", to_string(p.stage)}, {"message", p.message}};
    }
  };
  json j = std::visit(Payload{}, e.payload);
  j["type"] = event_name(e.payload);
  j["timing"] = optional_json(e.timing);
  return j;
}

UserPrompt prompt_from_json(const json& j) {
  UserPrompt p;
  p.text = j.at("text").get<std::string>();
  p.contains_code = j.at("contains_code").get<bool>();
  p.submitted_at = from_ms(j.at("submitted_at").get<std::int64_t>());
  return p;
}

ClarityAssessment assessment_from_json(const json& j) {
  return ClarityAssessment{ClarityLevel{j.at("level").get<int>()},
                           route_from_string(j.at("route").get<std::string>()),
                           source_from_string(j.at("source").get<std::string>())};
}

ClarificationSet clarification_from_json(const json& j) {
  ClarificationSet set;
  for (const auto& q : j.at("questions")) {
    set.questions.push_back({q.at("id").get<std::string>(), q.at("text").get<std::string>()});
  }
  set.generated_at = from_ms(j.at("generated_at").get<std::int64_t>());
  set.round_index = j.at("round_index").get<int>();
  return set;
}

ClarificationResponses responses_from_json(const json& j) {
  ClarificationResponses r;
  r.answers = j.at("answers").get<std::map<std::string, std::string>>();
  r.round_index = j.at("round_index").get<int>();
  return r;
}

StageTiming timing_from_json(const json& j) {
  return StageTiming{stage_from_string(j.at("stage").get<std::string>()),
                     std::chrono::microseconds{j.at("duration_us").get<std::int64_t>()}};
}

SessionLimits limits_from_json(const json& j) {
  SessionLimits l;
  l.max_rounds = j.at("max_rounds").get<int>();
  l.clear_min_level = j.at("clear_min_level").get<int>();
  l.max_questions_per_round = j.at("max_questions_per_round").get<int>();
  return l;
}

DialogueState state_from_json(const json& j) {
  DialogueState s;
  s.session_id = j.at("session_id").get<std::string>();
  if (!j.at("prompt").is_null()) s.prompt = prompt_from_json(j.at("prompt"));
  s.limits = limits_from_json(j.at("limits"));
  for (const auto& r : j.at("rounds")) {
    Round round{assessment_from_json(r.at("assessment")), std::nullopt, std::nullopt};
    if (!r.at("clarification").is_null()) {
      round.clarification = clarification_from_json(r.at("clarification"));
    }
    if (!r.at("responses").is_null()) round.responses = responses_from_json(r.at("responses"));
    s.rounds.push_back(std::move(round));
  }
  s.round_count = j.at("round_count").get<int>();
  s.status = status_from_string(j.at("status").get<std::string>());
  if (!j.at("final_answer").is_null()) s.final_answer = j.at("final_answer").get<std::string>();
  if (!j.at("failure").is_null()) s.failure = j.at("failure").get<std::string>();
  for (const auto& t : j.at("stage_timings")) s.stage_timings.push_back(timing_from_json(t));
  return s;
}

PipelineEvent event_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  PipelineEvent e;
  if (type == "prompt_submitted") {
    e.payload = events::PromptSubmitted{prompt_from_json(j.at("prompt")),
                                        limits_from_json(j.at("limits"))};
  } else if (type == "classified") {
    e.payload = events::Classified{assessment_from_json(j.at("assessment"))};
  } else if (type == "questions_generated") {
    e.payload = events::QuestionsGenerated{clarification_from_json(j.at("clarification"))};
  } else if (type == "user_responded") {
    e.payload = events::UserResponded{responses_from_json(j.at("responses"))};
  } else if (type == "answer_produced") {
    e.payload = events::AnswerProduced{j.at("text").get<std::string>()};
  } else if (type == "threshold_reached") {
    e.payload = events::ThresholdReached{
        threshold_reason_from_string(j.at("reason").get<std::string>())};
  } else if (type == "backend_failed") {
    e.payload = events::BackendFailed{stage_from_string(j.at("stage").get<std::string>()),
                                      j.at("message").get<std::string>()};
  } else {
    throw PreconditionError("unknown event type: " + type);
  }
  if (j.contains("timing") && !j.at("timing").is_null()) {
    e.timing = timing_from_json(j.at("timing"));
  }
  return e;
}

std::string canonical(const DialogueState& state) { return to_json(state).dump(); }

}  // namespace clarify

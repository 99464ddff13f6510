#include "clarify/core/types.hpp"

#include <algorithm>
#include <cctype>

#include "clarify/errors.hpp"

namespace clarify {

namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

bool starts_with_any(std::string_view s,
                     std::initializer_list<std::string_view> prefixes) {
  return std::any_of(prefixes.begin(), prefixes.end(),
                     [&](std::string_view p) { return s.starts_with(p); });
}

}  // namespace

Timestamp wall_now() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(
      std::chrono::system_clock::now());
}

bool looks_like_code_line(std::string_view line) {
  if (line.starts_with('\t') || line.starts_with("    ")) {
    return !is_blank(line);
  }
  const auto t = trim(line);
  if (t.empty()) return false;
  if (starts_with_any(t, {"//", "/*", "#include", "import ", "def ", "class ",
                          "function ", "async function", "return ", "const ",
                          "let ", "var ", "}", "{"})) {
    return true;
  }
  const char last = t.back();
  return last == ';' || last == '{' || last == '}';
}

bool detect_code(std::string_view text) {
  if (text.find("```") != std::string_view::npos) return true;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const auto line = text.substr(pos, end == std::string_view::npos
                                           ? std::string_view::npos
                                           : end - pos);
    if (looks_like_code_line(line)) return true;
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return false;
}

UserPrompt UserPrompt::make(std::string text, Timestamp submitted_at) {
  if (is_blank(text)) {
    throw PreconditionError("prompt text is empty");
  }
  UserPrompt p;
  p.contains_code = detect_code(text);
  p.text = std::move(text);
  p.submitted_at = submitted_at;
  return p;
}

ClarityLevel::ClarityLevel(int value) : value_(value) {
  if (value < kMin || value > kMax) {
    throw PreconditionError("clarity level must be in [1, 4], got " +
                            std::to_string(value));
  }
}

Route route_for(ClarityLevel level, int clear_min_level) {
  return level.value() >= clear_min_level ? Route::Answer : Route::Clarify;
}

ClarityAssessment ClarityAssessment::of(ClarityLevel level, int clear_min_level,
                                        AssessmentSource source) {
  return ClarityAssessment{level, route_for(level, clear_min_level), source};
}

const Question* ClarificationSet::find(std::string_view id) const {
  for (const auto& q : questions) {
    if (q.id == id) return &q;
  }
  return nullptr;
}

bool is_terminal(SessionStatus status) {
  return status == SessionStatus::Answered || status == SessionStatus::Aborted;
}

void SessionLimits::validate() const {
  if (max_rounds < 0) throw PreconditionError("max_rounds must be >= 0");
  if (clear_min_level < 2 || clear_min_level > 4) {
    throw PreconditionError("clear_min_level must be in {2, 3, 4}");
  }
  if (max_questions_per_round < 1) {
    throw PreconditionError("max_questions_per_round must be >= 1");
  }
}

DialogueState DialogueState::fresh(std::string session_id) {
  DialogueState s;
  s.session_id = std::move(session_id);
  return s;
}

const ClarificationSet* DialogueState::pending_questions() const {
  if (status != SessionStatus::AwaitingUserClarification || rounds.empty()) {
    return nullptr;
  }
  const auto& last = rounds.back();
  return last.clarification ? &*last.clarification : nullptr;
}

std::string_view to_string(Route route) {
  return route == Route::Answer ? "answer" : "clarify";
}

std::string_view to_string(AssessmentSource source) {
  switch (source) {
    case AssessmentSource::ModelBackend: return "model_backend";
    case AssessmentSource::Heuristic: return "heuristic";
    case AssessmentSource::Stub: return "stub";
  }
  return "unknown";
}

std::string_view to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::New: return "new";
    case SessionStatus::AwaitingClassification: return "awaiting_classification";
    case SessionStatus::AwaitingUserClarification:
      return "awaiting_user_clarification";
    case SessionStatus::Answering: return "answering";
    case SessionStatus::Answered: return "answered";
    case SessionStatus::Aborted: return "aborted";
  }
  return "unknown";
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Classify: return "classify";
    case Stage::Clarify: return "clarify";
    case Stage::Answer: return "answer";
  }
  return "unknown";
}

Route route_from_string(std::string_view s) {
  if (s == "answer") return Route::Answer;
  if (s == "clarify") return Route::Clarify;
  throw PreconditionError("unknown route: " + std::string(s));
}

AssessmentSource source_from_string(std::string_view s) {
  for (auto v : {AssessmentSource::ModelBackend, AssessmentSource::Heuristic,
                 AssessmentSource::Stub}) {
    if (to_string(v) == s) return v;
  }
  throw PreconditionError("unknown assessment source: " + std::string(s));
}

SessionStatus status_from_string(std::string_view s) {
  for (auto v : {SessionStatus::New, SessionStatus::AwaitingClassification,
                 SessionStatus::AwaitingUserClarification,
                 SessionStatus::Answering, SessionStatus::Answered,
                 SessionStatus::Aborted}) {
    if (to_string(v) == s) return v;
  }
  throw PreconditionError("unknown session status: " + std::string(s));
}

Stage stage_from_string(std::string_view s) {
  for (auto v : {Stage::Classify, Stage::Clarify, Stage::Answer}) {
    if (to_string(v) == s) return v;
  }
  throw PreconditionError("unknown stage: " + std::string(s));
}

}  // namespace clarify

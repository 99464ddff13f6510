#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace clarify {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

Timestamp wall_now();

// True if a line looks like source code rather than prose: indented by a
// tab or four spaces, or shaped like a statement/block/comment.
bool looks_like_code_line(std::string_view line);

// Fenced block (```), or at least one code-shaped line.
bool detect_code(std::string_view text);

struct UserPrompt {
  std::string text;
  bool contains_code = false;
  Timestamp submitted_at{};

  /// Throws PreconditionError when `text` is blank.
  static UserPrompt make(std::string text, Timestamp submitted_at = wall_now());

  friend bool operator==(const UserPrompt&, const UserPrompt&) = default;
};

/// Prompt clarity on the 4-point scale: 1 is severely under-specified,
/// 4 is fully specified.
class ClarityLevel {
 public:
  static constexpr int kMin = 1;
  static constexpr int kMax = 4;

  /// Throws PreconditionError outside [1, 4].
  explicit ClarityLevel(int value);

  int value() const noexcept { return value_; }

  friend auto operator<=>(ClarityLevel, ClarityLevel) = default;

 private:
  int value_;
};

enum class Route { Answer, Clarify };
enum class AssessmentSource { ModelBackend, Heuristic, Stub };

/// Answer iff level >= clear_min_level.
Route route_for(ClarityLevel level, int clear_min_level);

struct ClarityAssessment {
  ClarityLevel level{1};
  Route route = Route::Clarify;
  AssessmentSource source = AssessmentSource::Stub;

  static ClarityAssessment of(ClarityLevel level, int clear_min_level,
                              AssessmentSource source);

  friend bool operator==(const ClarityAssessment&,
                         const ClarityAssessment&) = default;
};

struct Question {
  std::string id;
  std::string text;

  friend bool operator==(const Question&, const Question&) = default;
};

struct ClarificationSet {
  std::vector<Question> questions;
  Timestamp generated_at{};
  int round_index = 1;

  const Question* find(std::string_view id) const;

  friend bool operator==(const ClarificationSet&,
                         const ClarificationSet&) = default;
};

struct ClarificationResponses {
  std::map<std::string, std::string> answers;
  int round_index = 1;

  friend bool operator==(const ClarificationResponses&,
                         const ClarificationResponses&) = default;
};

struct Round {
  ClarityAssessment assessment;
  std::optional<ClarificationSet> clarification;
  std::optional<ClarificationResponses> responses;

  friend bool operator==(const Round&, const Round&) = default;
};

enum class SessionStatus {
  New,
  AwaitingClassification,
  AwaitingUserClarification,
  Answering,
  Answered,
  Aborted,
};

bool is_terminal(SessionStatus status);

enum class Stage { Classify, Clarify, Answer };

struct StageTiming {
  Stage stage = Stage::Classify;
  std::chrono::microseconds duration{0};

  double millis() const { return static_cast<double>(duration.count()) / 1000.0; }

  friend bool operator==(const StageTiming&, const StageTiming&) = default;
};

/// Per-session knobs fixed when the prompt is submitted.
struct SessionLimits {
  int max_rounds = 3;
  int clear_min_level = 3;
  int max_questions_per_round = 3;

  /// Throws PreconditionError on out-of-range values.
  void validate() const;

  friend bool operator==(const SessionLimits&, const SessionLimits&) = default;
};

struct DialogueState {
  std::string session_id;
  std::optional<UserPrompt> prompt;
  SessionLimits limits;
  std::vector<Round> rounds;
  int round_count = 0;
  SessionStatus status = SessionStatus::New;
  std::optional<std::string> final_answer;
  std::optional<std::string> failure;
  std::vector<StageTiming> stage_timings;

  static DialogueState fresh(std::string session_id);

  /// The question set awaiting user input, if status is
  /// AwaitingUserClarification.
  const ClarificationSet* pending_questions() const;

  /// Classify calls made so far (one assessment per round).
  int classify_calls() const { return static_cast<int>(rounds.size()); }

  friend bool operator==(const DialogueState&, const DialogueState&) = default;
};

std::string_view to_string(Route route);
std::string_view to_string(AssessmentSource source);
std::string_view to_string(SessionStatus status);
std::string_view to_string(Stage stage);

Route route_from_string(std::string_view s);
AssessmentSource source_from_string(std::string_view s);
SessionStatus status_from_string(std::string_view s);
Stage stage_from_string(std::string_view s);

}  // namespace clarify

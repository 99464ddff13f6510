#pragma once

#include <chrono>
#include <memory>
#include <string_view>
#include <variant>
#include <vector>

#include "clarify/backend/client.hpp"
#include "clarify/core/types.hpp"
#include "clarify/util/prompt_template.hpp"

namespace clarify {

/// Scores through a chat backend (e.g. a hosted fine-tuned classifier behind
/// a chat-completions shim). The template has one {{context}} slot.
struct RemoteClassifier {
  std::shared_ptr<ChatClient> client;
  PromptTemplate scoring_template;
};

/// Offline fallback scoring from surface features. Not a trained model.
struct HeuristicClassifier {};

/// Returns levels[call_index], repeating the last level once the script is
/// exhausted. `latency` is spent on `clock` before answering.
struct StubClassifier {
  std::vector<int> levels;
  std::chrono::milliseconds latency{0};
  std::shared_ptr<Clock> clock;
};

struct ClassifierBinding {
  std::variant<RemoteClassifier, HeuristicClassifier, StubClassifier> kind;
  int clear_min_level = 3;

  /// Throws ConfigError on an out-of-range threshold, an empty stub
  /// script, a stub level outside [1, 4] or a remote binding without a
  /// client or {{context}} slot.
  void validate() const;
};

/// Level a remote reply falls back to when it cannot be parsed twice.
inline constexpr int kUnparseableFallbackLevel = 2;

/// `call_index` is the number of classify calls already made in the session;
/// only the stub uses it. Throws PreconditionError on blank context;
/// backend errors propagate.
ClarityAssessment classify(const ClassifierBinding& binding, std::string_view context,
                           int call_index = 0);

/// Extracts the single level digit from a model reply. Accepts surrounding
/// whitespace and light wrapping ("Level: 3", "3/4", "**2**"); throws
/// UnparseableLevel if no standalone digit in 1..4 is found or the first
/// standalone number is outside 1..4.
int parse_level_reply(std::string_view reply);

struct HeuristicFeatures {
  int prose_words = 0;
  bool has_code = false;
  bool has_goal = false;
  bool has_specifics = false;
  int answers = 0;
};

HeuristicFeatures extract_features(std::string_view context);
int heuristic_level(const HeuristicFeatures& features);

}  // namespace clarify

#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "clarify/backend/client.hpp"
#include "clarify/core/types.hpp"
#include "clarify/util/prompt_template.hpp"

namespace clarify {

/// A model standing in for the developer: it knows the hidden intent and
/// answers clarification questions from it.
struct SimulatedUser {
  std::shared_ptr<ChatClient> client;
  PromptTemplate answer_template = PromptTemplate::builtin("simulate_user");

  /// Template slots must be within {prompt, intent, questions}, each used.
  void validate() const;
};

/// Parses a numbered reply ("1. ...", "2) ...") into answers keyed by the
/// question ids of `questions`. Items that are blank or "SKIP" are left
/// out. A reply without numbering answers a single question as a whole.
ClarificationResponses parse_simulated_answers(std::string_view reply,
                                               const ClarificationSet& questions);

/// Asks the backend to answer `questions` in character. Backend errors
/// propagate.
ClarificationResponses simulate_user(const SimulatedUser& user, std::string_view prompt,
                                     std::string_view intent, const ClarificationSet& questions);

}  // namespace clarify

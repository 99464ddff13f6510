#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "clarify/backend/client.hpp"
#include "clarify/core/types.hpp"
#include "clarify/util/prompt_template.hpp"

namespace clarify {

struct ClarifierBinding {
  std::shared_ptr<ChatClient> client;
  // One {{context}} slot; {{max_questions}} is optional.
  PromptTemplate question_template = PromptTemplate::builtin("clarify");
  int max_questions_per_round = 3;

  void validate() const;
};

/// Splits a generator reply into questions. Accepts numbered items
/// ("1." "2)" "(3)" "Q4:"), bullets ("-" "*" "•") and bare lines ending in
/// '?'. Other lines are ignored. Duplicates are dropped and at most
/// `max_questions` are kept, in reply order.
std::vector<std::string> parse_questions(std::string_view reply, int max_questions);

/// Question ids are "r<round>-q<k>", unique within a session.
std::string question_id(int round_index, int k);

/// Asks the generator for questions about `context`. A reply yielding no
/// questions is retried once, then NoQuestionsParsed is thrown. Backend
/// errors propagate.
ClarificationSet generate_questions(const ClarifierBinding& binding, std::string_view context,
                                    int round_index, Timestamp generated_at);

}  // namespace clarify

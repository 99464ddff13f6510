#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "clarify/backend/client.hpp"
#include "clarify/core/types.hpp"
#include "clarify/util/prompt_template.hpp"

namespace clarify {

struct AnswererBinding {
  std::shared_ptr<ChatClient> client;
  PromptTemplate answer_template = PromptTemplate::builtin("answer");
  std::string system_preamble;
  int max_output_tokens = 2048;

  /// Throws ConfigError without a client or a single {{context}} slot.
  void validate() const;
};

/// Sends the templated context to the coding-assistant backend and returns
/// its completion verbatim. Throws PreconditionError on blank context;
/// backend errors propagate.
std::string answer(const AnswererBinding& binding, std::string_view context);

/// The comparison arm: same binding, raw prompt only, no clarification.
std::string answer_baseline(const AnswererBinding& binding, const UserPrompt& prompt);

}  // namespace clarify

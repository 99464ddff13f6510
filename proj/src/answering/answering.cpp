#include "clarify/answering/answering.hpp"

#include "clarify/errors.hpp"

namespace clarify {

void AnswererBinding::validate() const {
  if (!client) throw ConfigError("answerer has no backend");
  answer_template.require_single_slot("context");
}

std::string answer(const AnswererBinding& binding, std::string_view context) {
  if (context.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw PreconditionError("answer: context is empty");
  }
  auto request = make_request(binding.answer_template.render({{"context", std::string(context)}}),
                              binding.system_preamble);
  request.max_output_tokens = binding.max_output_tokens;
  request.correlation_id = "answer";
  return binding.client->complete(request).text;
}

std::string answer_baseline(const AnswererBinding& binding, const UserPrompt& prompt) {
  return answer(binding, prompt.text);
}

}  // namespace clarify

#include "clarify/engine/clarifier.hpp"

#include "clarify/errors.hpp"

namespace clarify {

void ClarifierBinding::validate() const {
  if (!client) throw ConfigError("clarifier has no backend");
  if (max_questions_per_round < 1) throw ConfigError("max_questions_per_round must be >= 1");
  question_template.require_single_slot("context", {"max_questions"});
}

std::string question_id(int round_index, int k) {
  return "r" + std::to_string(round_index) + "-q" + std::to_string(k);
}

ClarificationSet generate_questions(const ClarifierBinding& binding, std::string_view context,
                                    int round_index, Timestamp generated_at) {
  if (round_index < 1) throw PreconditionError("generate_questions: round_index must be >= 1");
  if (context.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw PreconditionError("generate_questions: context is empty");
  }
  auto request = make_request(binding.question_template.render(
      {{"context", std::string(context)},
       {"max_questions", std::to_string(binding.max_questions_per_round)}}));
  request.temperature = 0.2;
  request.max_output_tokens = 512;
  request.correlation_id = "clarify-r" + std::to_string(round_index);

  for (int attempt = 0; attempt < 2; ++attempt) {
    const auto reply = binding.client->complete(request);
    auto texts = parse_questions(reply.text, binding.max_questions_per_round);
    if (texts.empty()) continue;
    ClarificationSet set;
    set.round_index = round_index;
    set.generated_at = generated_at;
    for (std::size_t k = 0; k < texts.size(); ++k) {
      set.questions.push_back({question_id(round_index, static_cast<int>(k) + 1), std::move(texts[k])});
    }
    return set;
  }
  throw NoQuestionsParsed("clarifier reply contained no questions (after one retry)");
}

}  // namespace clarify

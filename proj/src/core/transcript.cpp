#include "clarify/core/transcript.hpp"

#include "clarify/errors.hpp"

namespace clarify {

std::string assemble_context(const DialogueState& state) {
  if (!state.prompt) {
    throw PreconditionError("assemble_context: session has no prompt");
  }
  std::string out = state.prompt->text;
  for (const auto& round : state.rounds) {
    if (!round.clarification) continue;
    for (const auto& q : round.clarification->questions) {
      out += "\nQ: ";
      out += q.text;
      if (!round.responses) continue;
      const auto it = round.responses->answers.find(q.id);
      if (it != round.responses->answers.end()) {
        out += "\nA: ";
        out += it->second;
      }
    }
  }
  return out;
}

}  // namespace clarify

#include "clarify/service/chat.hpp"

#include <istream>
#include <ostream>
#include <string>

namespace clarify {

int cli_chat(const Pipeline& pipeline, std::istream& in, std::ostream& out, std::ostream& err,
             const ChatOptions& options) {
  out << "Describe your request. End it with a line containing only \".\".\n";
  std::string prompt;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == ".") break;
    if (options.echo_input) out << "> " << line << "\n";
    if (!prompt.empty()) prompt += '\n';
    prompt += line;
  }
  if (prompt.find_first_not_of(" \t\r\n") == std::string::npos) {
    err << "error: the prompt is empty\n";
    return 2;
  }

  const int max_rounds = pipeline.deps().limits.max_rounds;
  const EventSink notes = [&](const PipelineEvent& event, const DialogueState&) {
    const auto* t = std::get_if<events::ThresholdReached>(&event.payload);
    if (!t) return;
    if (t->reason == events::ThresholdReason::MaxRounds) {
      out << "\n(reached the limit of " << max_rounds
          << " clarification rounds; answering with the details so far)\n";
    } else {
      out << "\n(no clarification questions could be generated; answering with the details so far)\n";
    }
  };

  auto state = pipeline.start("chat", UserPrompt::make(prompt, pipeline.deps().clock->wall_now()), notes);
  while (const auto* pending = state.pending_questions()) {
    out << "\nClarification round " << pending->round_index << " of at most " << max_rounds
        << ". Answer what you can; leave a line blank to skip.\n";
    for (std::size_t k = 0; k < pending->questions.size(); ++k) {
      out << "Q" << k + 1 << ": " << pending->questions[k].text << "\n";
    }
    ClarificationResponses responses;
    responses.round_index = pending->round_index;
    for (std::size_t k = 0; k < pending->questions.size(); ++k) {
      out << "A" << k + 1 << "> " << std::flush;
      std::string answer;
      if (!std::getline(in, answer)) answer.clear();
      if (!answer.empty() && answer.back() == '\r') answer.pop_back();
      if (options.echo_input) out << answer << "\n";
      if (answer.find_first_not_of(" \t") != std::string::npos) {
        responses.answers[pending->questions[k].id] = answer;
      }
    }
    state = pipeline.respond(state, std::move(responses), notes);
  }

  if (state.status == SessionStatus::Aborted) {
    err << "error: session aborted (" << state.failure.value_or("unknown failure") << ")\n";
    return 1;
  }
  out << "\n--- answer ---\n" << state.final_answer.value_or("") << "\n";
  return 0;
}

}  // namespace clarify

#pragma once

#include <iosfwd>

#include "clarify/engine/pipeline.hpp"

namespace clarify {

struct ChatOptions {
  // Repeat what was read from `in`, for transcripts of non-interactive runs.
  bool echo_input = false;
};

/// Terminal session: reads the prompt up to a line holding only "." (or
/// EOF), prints each round's questions, reads one answer line per question
/// (blank = skip) and prints the final answer. Returns 0 when answered,
/// 1 when the session aborted and 2 for an empty prompt.
int cli_chat(const Pipeline& pipeline, std::istream& in, std::ostream& out, std::ostream& err,
             const ChatOptions& options = {});

}  // namespace clarify

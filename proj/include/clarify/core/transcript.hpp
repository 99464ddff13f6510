#pragma once

#include <string>

#include "clarify/core/types.hpp"

namespace clarify {

/// Renders the dialogue so far as the text the classifier and the answerer
/// see: the original prompt, then per round every question as "Q: ..." and,
/// when answered, "A: ..." directly after it. Lines are joined with '\n' and
/// there is no trailing newline. Format version 1; do not change without
/// bumping kTranscriptFormatVersion.
std::string assemble_context(const DialogueState& state);

inline constexpr int kTranscriptFormatVersion = 1;

}  // namespace clarify

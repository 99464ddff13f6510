#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clarify/service/config.hpp"

namespace clarify {

/// One line of a batch input file: {"id", "prompt", "intent"}. A missing
/// intent defaults to the prompt.
struct BatchPrompt {
  std::string id;
  std::string prompt;
  std::string intent;
};

std::vector<BatchPrompt> load_batch_prompts(const std::filesystem::path& path);

struct BatchOptions {
  int jobs = 1;
  // Also answer the raw prompt alone (the comparison arm).
  bool baseline = false;
  // With baseline: write answer-study items {item_id, prompt, ours, baseline}.
  std::optional<std::filesystem::path> items_out;
};

/// Runs one prompt with the simulated user answering every round. The record
/// holds the rounds, transcript, answer, stage timings and wall time.
nlohmann::json run_batch_item(const Runtime& runtime, const BatchPrompt& prompt, bool baseline);

/// Processes every prompt and writes one JSON line per prompt, in input
/// order. Returns 0 on success and 2 when the input cannot be read or the
/// runtime has no simulated user.
int cli_batch(const Runtime& runtime, const std::filesystem::path& in,
              const std::filesystem::path& out, const BatchOptions& options, std::ostream& err);

}  // namespace clarify

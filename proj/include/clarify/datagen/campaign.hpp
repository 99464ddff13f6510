#pragma once

#include <functional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "clarify/datagen/examples.hpp"

namespace clarify {

enum class AttemptOutcome { Parsed, FailedParse, FailedTimeout };

std::string_view to_string(AttemptOutcome outcome);

struct AttemptRecord {
  int index = 0;
  AttemptOutcome outcome = AttemptOutcome::Parsed;
  nlohmann::json example;  // dataset line when parsed
  std::string detail;      // failure reason otherwise
};

/// Runs attempt(i) for every i in [0, n) not in `skip`, with at most `width`
/// attempts in flight, and hands results to `sink` on the calling thread in
/// increasing index order. An exception escaping `attempt` stops the
/// campaign and is rethrown once in-flight attempts finish. Returns the
/// report over the indices actually run.
GenerationCampaignReport run_campaign(int n, int width,
                                      const std::function<AttemptRecord(int)>& attempt,
                                      const std::function<void(const AttemptRecord&)>& sink,
                                      const std::set<int>& skip = {});

}  // namespace clarify

#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <set>

#include "clarify/backend/stub_transport.hpp"

namespace clarify {

/// Offline stand-in for a teacher model. Every decision is a pure function
/// of (seed, request index), with the index read from the correlation id
/// ("classifier:<i>" or "clarification:<i>"), so campaigns are reproducible
/// regardless of concurrency or retries.
struct SyntheticTeacherOptions {
  double malformed_rate = 0.0;
  double timeout_rate = 0.0;
  std::set<int> timeout_indices;  // always time out
  std::uint64_t seed = 0;
  std::chrono::milliseconds latency{0};
};

std::shared_ptr<StubTransport> make_synthetic_teacher(SyntheticTeacherOptions options,
                                                      std::shared_ptr<Clock> clock = nullptr);

/// Request index encoded in a datagen correlation id, or -1.
int datagen_index(std::string_view correlation_id);

}  // namespace clarify

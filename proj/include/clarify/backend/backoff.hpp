#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>

namespace clarify {

/// Exponential backoff with full jitter, clamped so one request's delays
/// never decrease: delay_k = max(delay_{k-1}, U[0, min(cap, base * 2^k)]).
/// A server-provided Retry-After acts as an extra floor.
class BackoffSchedule {
 public:
  using duration = std::chrono::milliseconds;

  BackoffSchedule(duration base, duration cap, std::uint64_t seed);

  duration next(std::optional<duration> floor = std::nullopt);

  int attempts() const { return attempt_; }
  static duration ceiling(duration base, duration cap, int attempt);

 private:
  duration base_;
  duration cap_;
  std::mt19937_64 rng_;
  int attempt_ = 0;
  duration previous_{0};
};

}  // namespace clarify

#include "clarify/backend/backoff.hpp"

#include <algorithm>

namespace clarify {

BackoffSchedule::BackoffSchedule(duration base, duration cap, std::uint64_t seed)
    : base_(base), cap_(std::max(cap, base)), rng_(seed) {}

BackoffSchedule::duration BackoffSchedule::ceiling(duration base, duration cap, int attempt) {
  const int shift = std::min(attempt, 30);
  const auto scaled = base.count() * (std::int64_t{1} << shift);
  return duration{std::min<std::int64_t>(scaled, std::max(cap, base).count())};
}

BackoffSchedule::duration BackoffSchedule::next(std::optional<duration> floor) {
  const auto top = ceiling(base_, cap_, attempt_++);
  duration drawn{0};
  if (top.count() > 0) {
    // top + 1 values so the ceiling itself is reachable.
    drawn = duration{static_cast<std::int64_t>(
        rng_() % static_cast<std::uint64_t>(top.count() + 1))};
  }
  auto delay = std::max(previous_, drawn);
  if (floor) delay = std::max(delay, *floor);
  previous_ = delay;
  return delay;
}

}  // namespace clarify

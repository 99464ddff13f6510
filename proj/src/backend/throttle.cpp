#include "clarify/backend/throttle.hpp"

#include <algorithm>

#include "clarify/errors.hpp"

namespace clarify {

ThrottleGate::ThrottleGate(int requests_per_window, std::shared_ptr<Clock> clock,
                           Clock::duration window)
    : limit_(requests_per_window), window_(window), clock_(std::move(clock)) {
  if (limit_ <= 0) throw PreconditionError("requests_per_minute must be > 0");
  if (window_ <= Clock::duration::zero()) throw PreconditionError("throttle window must be > 0");
  if (!clock_) throw PreconditionError("throttle requires a clock");
}

Permit ThrottleGate::acquire() {
  Clock::time_point slot;
  const auto arrived = clock_->now();
  {
    std::lock_guard lock(mu_);
    slot = arrived;
    if (static_cast<int>(grants_.size()) >= limit_) {
      slot = std::max(slot, grants_.front() + window_);
    }
    if (!grants_.empty()) slot = std::max(slot, grants_.back());
    grants_.push_back(slot);
    while (static_cast<int>(grants_.size()) > limit_) grants_.pop_front();
  }
  if (slot > arrived) clock_->sleep_until(slot);
  return Permit{slot, slot - arrived};
}

}  // namespace clarify

#pragma once

#include <chrono>
#include <deque>
#include <memory>
#include <mutex>

#include "clarify/backend/clock.hpp"

namespace clarify {

struct Permit {
  Clock::time_point granted_at;
  Clock::duration waited{0};
};

/// Sliding-window request gate: at most `requests_per_window` permits are
/// granted in any window of length `window`.
///
/// Callers reserve their slot under the lock and sleep outside it, so the
/// gate is the only synchronization point and concurrent callers are granted
/// in arrival order. The k-th permit is never earlier than the
/// (k - limit)-th permit plus the window.
class ThrottleGate {
 public:
  ThrottleGate(int requests_per_window, std::shared_ptr<Clock> clock,
               Clock::duration window = std::chrono::seconds{60});

  Permit acquire();

  int limit() const { return limit_; }
  Clock::duration window() const { return window_; }

 private:
  int limit_;
  Clock::duration window_;
  std::shared_ptr<Clock> clock_;
  std::mutex mu_;
  std::deque<Clock::time_point> grants_;  // last `limit_` grant times, ascending
};

}  // namespace clarify

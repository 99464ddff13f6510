#include "clarify/backend/clock.hpp"

#include <thread>

namespace clarify {

void RealClock::sleep_until(time_point t) { std::this_thread::sleep_until(t); }

std::shared_ptr<Clock> real_clock() {
  static const auto clock = std::make_shared<RealClock>();
  return clock;
}

SimulatedClock::SimulatedClock(Timestamp wall_origin) : wall_origin_(wall_origin) {}

Clock::time_point SimulatedClock::now() const {
  std::lock_guard lock(mu_);
  return time_point{} + elapsed_;
}

Timestamp SimulatedClock::wall_now() const {
  std::lock_guard lock(mu_);
  return wall_origin_ + std::chrono::duration_cast<std::chrono::milliseconds>(elapsed_);
}

void SimulatedClock::sleep_until(time_point t) {
  std::lock_guard lock(mu_);
  const auto target = t - time_point{};
  sleeps_.push_back(target > elapsed_ ? target - elapsed_ : duration{0});
  if (target > elapsed_) elapsed_ = target;
}

void SimulatedClock::advance(duration d) {
  std::lock_guard lock(mu_);
  elapsed_ += d;
}

std::vector<Clock::duration> SimulatedClock::sleeps() const {
  std::lock_guard lock(mu_);
  return sleeps_;
}

}  // namespace clarify

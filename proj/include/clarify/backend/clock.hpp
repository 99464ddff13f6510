#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <vector>

#include "clarify/core/types.hpp"

namespace clarify {

/// Time source for everything that waits: throttling, backoff, stub latency
/// and stage timing. Tests swap in SimulatedClock so waits cost nothing.
class Clock {
 public:
  using time_point = std::chrono::steady_clock::time_point;
  using duration = std::chrono::steady_clock::duration;

  virtual ~Clock() = default;
  virtual time_point now() const = 0;
  virtual Timestamp wall_now() const = 0;
  virtual void sleep_until(time_point t) = 0;

  void sleep_for(duration d) { sleep_until(now() + d); }
};

class RealClock final : public Clock {
 public:
  time_point now() const override { return std::chrono::steady_clock::now(); }
  Timestamp wall_now() const override { return clarify::wall_now(); }
  void sleep_until(time_point t) override;
};

std::shared_ptr<Clock> real_clock();

/// Manually driven clock. sleep_until() jumps time forward instead of
/// blocking and records the requested sleep.
class SimulatedClock final : public Clock {
 public:
  explicit SimulatedClock(Timestamp wall_origin = Timestamp{std::chrono::milliseconds{1'700'000'000'000}});

  time_point now() const override;
  Timestamp wall_now() const override;
  void sleep_until(time_point t) override;
  void advance(duration d);

  std::vector<duration> sleeps() const;

 private:
  mutable std::mutex mu_;
  duration elapsed_{0};
  Timestamp wall_origin_;
  std::vector<duration> sleeps_;
};

}  // namespace clarify

#include "clarify/datagen/campaign.hpp"

#include <atomic>
#include <condition_variable>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "clarify/errors.hpp"

namespace clarify {

std::string_view to_string(AttemptOutcome outcome) {
  switch (outcome) {
    case AttemptOutcome::Parsed: return "parsed";
    case AttemptOutcome::FailedParse: return "parse";
    case AttemptOutcome::FailedTimeout: return "timeout";
  }
  return "unknown";
}

GenerationCampaignReport run_campaign(int n, int width,
                                      const std::function<AttemptRecord(int)>& attempt,
                                      const std::function<void(const AttemptRecord&)>& sink,
                                      const std::set<int>& skip) {
  if (n < 0) throw PreconditionError("campaign size must be >= 0");
  if (width < 1) throw PreconditionError("campaign width must be >= 1");

  std::vector<int> todo;
  for (int i = 0; i < n; ++i) {
    if (!skip.count(i)) todo.push_back(i);
  }

  GenerationCampaignReport report;
  auto account = [&](const AttemptRecord& r) {
    ++report.attempted;
    switch (r.outcome) {
      case AttemptOutcome::Parsed: ++report.parsed; break;
      case AttemptOutcome::FailedParse: ++report.failed_parse; break;
      case AttemptOutcome::FailedTimeout: ++report.failed_timeout; break;
    }
    if (sink) sink(r);
  };

  if (width == 1 || todo.size() <= 1) {
    for (int i : todo) account(attempt(i));
    return report;
  }

  std::mutex mu;
  std::condition_variable ready_cv;
  std::condition_variable space_cv;
  std::map<std::size_t, AttemptRecord> ready;  // keyed by position in todo
  std::size_t emitted = 0;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  bool stop = false;
  // Workers may run at most this far ahead of the writer.
  const std::size_t window = static_cast<std::size_t>(width) * 4;

  auto worker = [&] {
    for (;;) {
      std::size_t pos;
      {
        std::unique_lock lock(mu);
        space_cv.wait(lock, [&] { return stop || next.load() < emitted + window; });
        if (stop) return;
        pos = next++;
      }
      if (pos >= todo.size()) return;
      try {
        auto record = attempt(todo[pos]);
        std::lock_guard lock(mu);
        ready.emplace(pos, std::move(record));
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
      ready_cv.notify_all();
      space_cv.notify_all();
    }
  };

  std::vector<std::thread> threads;
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(width), todo.size());
  for (std::size_t t = 0; t < count; ++t) threads.emplace_back(worker);

  try {
    std::unique_lock lock(mu);
    while (emitted < todo.size()) {
      ready_cv.wait(lock, [&] { return stop || ready.count(emitted); });
      if (stop) break;
      auto record = std::move(ready.at(emitted));
      ready.erase(emitted);
      ++emitted;
      lock.unlock();
      space_cv.notify_all();
      account(record);
      lock.lock();
    }
  } catch (...) {
    std::lock_guard lock(mu);
    if (!failure) failure = std::current_exception();
    stop = true;
  }
  {
    std::lock_guard lock(mu);
    stop = true;
  }
  space_cv.notify_all();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return report;
}

}  // namespace clarify

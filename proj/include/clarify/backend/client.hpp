#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <random>

#include "clarify/backend/backoff.hpp"
#include "clarify/backend/clock.hpp"
#include "clarify/backend/throttle.hpp"
#include "clarify/backend/transport.hpp"
#include "clarify/backend/types.hpp"

namespace clarify {

/// Chat-completion client: throttle, one transport attempt, retry transient
/// failures with backoff. Shareable across threads.
class ChatClient {
 public:
  struct Options {
    std::shared_ptr<Clock> clock;          // defaults to real_clock()
    std::shared_ptr<ThrottleGate> gate;    // defaults to a private gate at config rpm
    std::uint64_t seed = std::random_device{}();
  };

  ChatClient(BackendConfig config, std::shared_ptr<Transport> transport);
  ChatClient(BackendConfig config, std::shared_ptr<Transport> transport, Options options);

  /// Throws BackendExhausted after max_retries + 1 transient failures,
  /// InvalidResponse for an unparseable payload, BackendRejected for a
  /// non-retryable HTTP status.
  ChatCompletion complete(const ChatRequest& request);

  const BackendConfig& config() const { return config_; }
  const std::shared_ptr<Clock>& clock() const { return clock_; }
  const std::shared_ptr<ThrottleGate>& gate() const { return gate_; }

 private:
  BackendConfig config_;
  std::shared_ptr<Transport> transport_;
  std::shared_ptr<Clock> clock_;
  std::shared_ptr<ThrottleGate> gate_;
  std::mutex rng_mu_;
  std::mt19937_64 seeder_;
};

}  // namespace clarify

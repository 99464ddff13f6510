#include "clarify/backend/client.hpp"

#include "clarify/errors.hpp"

namespace clarify {

ChatClient::ChatClient(BackendConfig config, std::shared_ptr<Transport> transport)
    : ChatClient(std::move(config), std::move(transport), Options{}) {}

ChatClient::ChatClient(BackendConfig config, std::shared_ptr<Transport> transport,
                       Options options)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      clock_(options.clock ? std::move(options.clock) : real_clock()),
      gate_(std::move(options.gate)),
      seeder_(options.seed) {
  config_.validate();
  if (!transport_) throw PreconditionError("chat client requires a transport");
  if (!gate_) gate_ = std::make_shared<ThrottleGate>(config_.requests_per_minute, clock_);
}

ChatCompletion ChatClient::complete(const ChatRequest& request) {
  request.validate();
  std::uint64_t seed;
  {
    std::lock_guard lock(rng_mu_);
    seed = seeder_();
  }
  BackoffSchedule backoff(config_.backoff_base, config_.backoff_cap, seed);

  const auto started = clock_->now();
  std::string last_error;
  const int max_attempts = config_.max_retries + 1;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    gate_->acquire();
    AttemptResult result = transport_->send(config_, request);
    if (result.reply) {
      ChatCompletion c;
      c.text = std::move(result.reply->text);
      c.token_logprobs = std::move(result.reply->token_logprobs);
      if (c.token_logprobs) {
        for (const auto& t : *c.token_logprobs) {
          if (t.logprob > 0.0) throw InvalidResponse("positive logprob in completion");
        }
      }
      c.attempts = attempt;
      c.latency = std::chrono::duration_cast<std::chrono::microseconds>(clock_->now() - started);
      return c;
    }
    last_error = std::string(to_string(result.failure));
    if (!result.detail.empty()) last_error += ": " + result.detail;
    if (result.failure == AttemptFailure::Invalid) throw InvalidResponse(last_error);
    if (!is_transient(result.failure)) throw BackendRejected(last_error, result.http_status);
    if (attempt < max_attempts) clock_->sleep_for(backoff.next(result.retry_after));
  }
  throw BackendExhausted("backend " + config_.model_name + " failed after " +
                             std::to_string(max_attempts) + " attempts: " + last_error,
                         max_attempts);
}

}  // namespace clarify

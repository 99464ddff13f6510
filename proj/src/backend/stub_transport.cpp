#include "clarify/backend/stub_transport.hpp"

namespace clarify {

StubStep StubStep::text(std::string reply, std::chrono::milliseconds latency) {
  StubStep s;
  s.reply = std::move(reply);
  s.latency = latency;
  return s;
}

StubStep StubStep::failure(AttemptFailure fault) {
  StubStep s;
  s.fault = fault;
  return s;
}

StubStep StubStep::echo() { return StubStep{}; }

StubTransport::StubTransport(std::vector<StubStep> script, StubExhausted then,
                             std::shared_ptr<Clock> clock)
    : script_(std::move(script)), then_(then), clock_(clock ? std::move(clock) : real_clock()) {}

StubTransport::StubTransport(Responder responder, std::shared_ptr<Clock> clock)
    : responder_(std::move(responder)), clock_(clock ? std::move(clock) : real_clock()) {}

StubStep StubTransport::step_for(const ChatRequest& request, int index) const {
  if (responder_) return responder_(request, index);
  const auto n = static_cast<int>(script_.size());
  if (index < n) return script_[static_cast<std::size_t>(index)];
  switch (then_) {
    case StubExhausted::RepeatLast:
      return n > 0 ? script_.back() : StubStep::echo();
    case StubExhausted::Cycle:
      return n > 0 ? script_[static_cast<std::size_t>(index % n)] : StubStep::echo();
    case StubExhausted::Echo:
      return StubStep::echo();
    case StubExhausted::Fail:
      return StubStep::failure(AttemptFailure::ServerError);
  }
  return StubStep::echo();
}

AttemptResult StubTransport::send(const BackendConfig&, const ChatRequest& request) {
  int index;
  {
    std::lock_guard lock(mu_);
    index = calls_++;
    requests_.push_back(request);
  }
  const StubStep step = step_for(request, index);
  const auto latency = base_latency_ + step.latency;
  if (latency.count() > 0) clock_->sleep_for(latency);

  if (step.fault) {
    const int status = *step.fault == AttemptFailure::RateLimited   ? 429
                       : *step.fault == AttemptFailure::ServerError ? 503
                       : *step.fault == AttemptFailure::Rejected    ? 400
                                                                    : 0;
    auto r = AttemptResult::fail(*step.fault, "injected by stub", status);
    r.retry_after = step.retry_after;
    return r;
  }
  AttemptReply reply;
  reply.text = step.reply ? *step.reply : request.last_user_content();
  reply.token_logprobs = step.logprobs;
  return AttemptResult::ok(std::move(reply));
}

int StubTransport::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

std::vector<ChatRequest> StubTransport::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

}  // namespace clarify

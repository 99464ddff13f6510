#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "clarify/backend/clock.hpp"
#include "clarify/backend/transport.hpp"

namespace clarify {

/// One scripted reaction of the stub backend.
struct StubStep {
  std::optional<std::string> reply;  // unset with no fault: echo the last user message
  std::optional<AttemptFailure> fault;
  std::chrono::milliseconds latency{0};
  std::optional<std::vector<TokenLogProb>> logprobs;
  std::optional<std::chrono::milliseconds> retry_after;

  static StubStep text(std::string reply, std::chrono::milliseconds latency = {});
  static StubStep failure(AttemptFailure fault);
  static StubStep echo();
};

/// What the stub does once its script is used up.
enum class StubExhausted { RepeatLast, Cycle, Echo, Fail };

/// Deterministic in-process backend: canned replies, injected faults and
/// latency, all driven by a script or a responder function. Records every
/// request it receives.
class StubTransport final : public Transport {
 public:
  using Responder = std::function<StubStep(const ChatRequest&, int call_index)>;

  StubTransport(std::vector<StubStep> script, StubExhausted then,
                std::shared_ptr<Clock> clock = nullptr);
  explicit StubTransport(Responder responder, std::shared_ptr<Clock> clock = nullptr);

  AttemptResult send(const BackendConfig& config, const ChatRequest& request) override;

  int calls() const;
  std::vector<ChatRequest> requests() const;

  /// Latency added to every step on top of the step's own.
  void set_base_latency(std::chrono::milliseconds latency) { base_latency_ = latency; }

 private:
  StubStep step_for(const ChatRequest& request, int index) const;

  std::vector<StubStep> script_;
  StubExhausted then_ = StubExhausted::RepeatLast;
  Responder responder_;
  std::shared_ptr<Clock> clock_;
  std::chrono::milliseconds base_latency_{0};
  mutable std::mutex mu_;
  int calls_ = 0;
  std::vector<ChatRequest> requests_;
};

}  // namespace clarify

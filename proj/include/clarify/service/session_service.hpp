#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clarify/engine/pipeline.hpp"
#include "clarify/service/event_log.hpp"

namespace clarify {

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;
};

/// Client-facing projection of a session: status, rounds, pending
/// questions, answer, transcript and per-stage timings (milliseconds).
nlohmann::json session_view(const DialogueState& state);

/// Session registry behind the HTTP API. Every applied event is appended to
/// the session's log before the call returns. Mutations of one session are
/// single-writer: a concurrent second writer gets 409.
class SessionService {
 public:
  using IdSource = std::function<std::string()>;

  SessionService(Pipeline pipeline, std::filesystem::path data_dir,
                 IdSource ids = {}, std::shared_ptr<Clock> clock = nullptr);

  /// Body {"prompt": "..."}. 201 with the session view; 400 for a missing
  /// or blank prompt; 502 if a backend stage failed.
  ServiceResponse create(const nlohmann::json& body);
  /// Body {"answers": {question_id: text}}. 404 unknown session, 409 not
  /// awaiting clarification (or busy), 422 unknown question id, 400 bad
  /// body, 502 backend failure, else 200.
  ServiceResponse respond(const std::string& session_id, const nlohmann::json& body);
  ServiceResponse get(const std::string& session_id) const;
  ServiceResponse health() const;

  /// Replays every log under the data directory and resumes sessions that
  /// stopped inside a backend stage. Logs that fail to replay are listed by
  /// health() and not served. Returns the number of sessions loaded.
  int recover();

  std::optional<DialogueState> snapshot(const std::string& session_id) const;
  const EventStore& store() const { return store_; }

 private:
  struct Entry {
    std::mutex write_mu;
    mutable std::mutex state_mu;
    DialogueState state;
    std::unique_ptr<EventLog> log;
  };

  std::shared_ptr<Entry> find(const std::string& session_id) const;
  EventSink sink_for(Entry& entry) const;
  DialogueState current(const Entry& entry) const;
  ServiceResponse view_response(const DialogueState& state, int ok_status) const;

  Pipeline pipeline_;
  EventStore store_;
  IdSource ids_;
  std::shared_ptr<Clock> clock_;
  mutable std::shared_mutex map_mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::vector<std::string> corrupt_;
};

}  // namespace clarify

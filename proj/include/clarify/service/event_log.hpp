#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clarify/core/state_machine.hpp"
#include "clarify/util/jsonl.hpp"

namespace clarify {

/// One persisted pipeline event. sequence_no starts at 0 and increases by
/// exactly one per event of a session.
struct SessionEvent {
  std::string session_id;
  std::int64_t sequence_no = 0;
  Timestamp wall_time{};
  PipelineEvent event;
};

nlohmann::json to_json(const SessionEvent& e);
SessionEvent session_event_from_json(const nlohmann::json& j);

/// Rebuilds the session by folding the events through transition(). Throws
/// CorruptLog on an empty log, a sequence gap, a record of another session
/// or an illegal transition.
DialogueState replay(const std::vector<SessionEvent>& events);

/// Parses a log file. A final line without a newline is a torn append and
/// is ignored; any other unparseable line throws CorruptLog.
std::vector<SessionEvent> read_event_log(const std::filesystem::path& path);

/// Durable appender for one session's log (fsync after every record).
class EventLog {
 public:
  EventLog(std::filesystem::path path, std::string session_id, std::int64_t next_sequence_no = 0);

  /// Writes the record and returns its sequence number.
  std::int64_t append(const PipelineEvent& event, Timestamp wall_time);

  std::int64_t next_sequence_no() const { return next_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::string session_id_;
  std::int64_t next_;
  JsonlAppender out_;
};

/// Session logs live at <data_dir>/sessions/<session_id>.jsonl.
class EventStore {
 public:
  explicit EventStore(std::filesystem::path data_dir);

  std::filesystem::path path_for(std::string_view session_id) const;
  /// Ids with a log file, sorted.
  std::vector<std::string> session_ids() const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

/// Session ids are limited to [A-Za-z0-9_-], 1..64 characters, so they are
/// safe as file names.
bool valid_session_id(std::string_view id);

}  // namespace clarify

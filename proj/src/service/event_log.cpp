#include "clarify/service/event_log.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "clarify/core/serialization.hpp"
#include "clarify/errors.hpp"

namespace clarify {

nlohmann::json to_json(const SessionEvent& e) {
  return {{"session_id", e.session_id},
          {"sequence_no", e.sequence_no},
          {"wall_time", e.wall_time.time_since_epoch().count()},
          {"event", to_json(e.event)}};
}

SessionEvent session_event_from_json(const nlohmann::json& j) {
  SessionEvent e;
  e.session_id = j.at("session_id").get<std::string>();
  e.sequence_no = j.at("sequence_no").get<std::int64_t>();
  e.wall_time = Timestamp{std::chrono::milliseconds{j.at("wall_time").get<std::int64_t>()}};
  e.event = event_from_json(j.at("event"));
  return e;
}

DialogueState replay(const std::vector<SessionEvent>& events) {
  if (events.empty()) throw CorruptLog("event log is empty");
  auto state = DialogueState::fresh(events.front().session_id);
  std::int64_t expected = 0;
  for (const auto& e : events) {
    if (e.session_id != state.session_id) {
      throw CorruptLog("record " + std::to_string(e.sequence_no) + " belongs to session " +
                       e.session_id);
    }
    if (e.sequence_no != expected) {
      throw CorruptLog("sequence gap: expected " + std::to_string(expected) + ", found " +
                       std::to_string(e.sequence_no));
    }
    try {
      state = transition(state, e.event);
    } catch (const IllegalTransition& err) {
      throw CorruptLog("record " + std::to_string(e.sequence_no) + ": " + err.what());
    }
    ++expected;
  }
  return state;
}

std::vector<SessionEvent> read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptLog("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const auto text = buf.str();

  std::vector<SessionEvent> out;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    ++line_no;
    if (nl == std::string::npos) break;  // torn final append
    const auto line = std::string_view(text).substr(pos, nl - pos);
    pos = nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(session_event_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw CorruptLog(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

namespace {

// A torn final append must not be glued onto the next record.
const std::filesystem::path& drop_torn_tail(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return path;
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto text = buf.str();
  if (!text.empty() && text.back() != '\n') {
    const auto keep = text.rfind('\n');
    std::filesystem::resize_file(path, keep == std::string::npos ? 0 : keep + 1);
  }
  return path;
}

}  // namespace

EventLog::EventLog(std::filesystem::path path, std::string session_id, std::int64_t next_sequence_no)
    : path_(std::move(path)),
      session_id_(std::move(session_id)),
      next_(next_sequence_no),
      out_(drop_torn_tail(path_), true) {}

std::int64_t EventLog::append(const PipelineEvent& event, Timestamp wall_time) {
  SessionEvent record{session_id_, next_, wall_time, event};
  out_.append(to_json(record));
  return next_++;
}

EventStore::EventStore(std::filesystem::path data_dir) : dir_(std::move(data_dir) / "sessions") {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path EventStore::path_for(std::string_view session_id) const {
  if (!valid_session_id(session_id)) {
    throw PreconditionError("invalid session id: " + std::string(session_id));
  }
  return dir_ / (std::string(session_id) + ".jsonl");
}

std::vector<std::string> EventStore::session_ids() const {
  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".jsonl") continue;
    auto id = entry.path().stem().string();
    if (valid_session_id(id)) ids.push_back(std::move(id));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

bool valid_session_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
           c == '_';
  });
}

}  // namespace clarify

#include "clarify/service/session_service.hpp"

#include <random>

#include "clarify/core/serialization.hpp"
#include "clarify/core/transcript.hpp"
#include "clarify/errors.hpp"

namespace clarify {

namespace {

ServiceResponse error(int status, std::string message) {
  return {status, {{"error", std::move(message)}}};
}

nlohmann::json questions_json(const ClarificationSet& set) {
  nlohmann::json qs = nlohmann::json::array();
  for (const auto& q : set.questions) qs.push_back({{"id", q.id}, {"text", q.text}});
  return qs;
}

std::string random_id() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  static constexpr char hex[] = "0123456789abcdef";
  std::string id = "s-";
  auto x = rng();
  for (int i = 0; i < 16; ++i, x >>= 4) id += hex[x & 0xF];
  return id;
}

}  // namespace

nlohmann::json session_view(const DialogueState& s) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : s.rounds) {
    nlohmann::json round{{"level", r.assessment.level.value()},
                         {"route", to_string(r.assessment.route)},
                         {"source", to_string(r.assessment.source)}};
    if (r.clarification) {
      round["round_index"] = r.clarification->round_index;
      round["questions"] = questions_json(*r.clarification);
    }
    if (r.responses) round["answers"] = r.responses->answers;
    rounds.push_back(std::move(round));
  }
  nlohmann::json timings = nlohmann::json::array();
  for (const auto& t : s.stage_timings) {
    timings.push_back({{"stage", to_string(t.stage)}, {"duration_ms", t.millis()}});
  }
  nlohmann::json v{{"session_id", s.session_id},
                   {"status", to_string(s.status)},
                   {"round_count", s.round_count},
                   {"max_rounds", s.limits.max_rounds},
                   {"rounds", rounds},
                   {"stage_timings", timings}};
  if (s.prompt) {
    v["prompt"] = s.prompt->text;
    v["transcript"] = assemble_context(s);
  }
  if (const auto* pending = s.pending_questions()) {
    v["pending_questions"] = questions_json(*pending);
    v["pending_round"] = pending->round_index;
  }
  if (s.final_answer) v["answer"] = *s.final_answer;
  if (s.failure) v["failure"] = *s.failure;
  return v;
}

SessionService::SessionService(Pipeline pipeline, std::filesystem::path data_dir, IdSource ids,
                               std::shared_ptr<Clock> clock)
    : pipeline_(std::move(pipeline)),
      store_(std::move(data_dir)),
      ids_(ids ? std::move(ids) : IdSource(random_id)),
      clock_(clock ? std::move(clock) : real_clock()) {}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& id) const {
  std::shared_lock lock(map_mu_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

EventSink SessionService::sink_for(Entry& entry) const {
  return [this, &entry](const PipelineEvent& event, const DialogueState& after) {
    entry.log->append(event, clock_->wall_now());
    std::lock_guard lock(entry.state_mu);
    entry.state = after;
  };
}

DialogueState SessionService::current(const Entry& entry) const {
  std::lock_guard lock(entry.state_mu);
  return entry.state;
}

ServiceResponse SessionService::view_response(const DialogueState& state, int ok_status) const {
  return {state.status == SessionStatus::Aborted ? 502 : ok_status, session_view(state)};
}

ServiceResponse SessionService::create(const nlohmann::json& body) {
  if (!body.is_object() || !body.contains("prompt") || !body["prompt"].is_string()) {
    return error(400, "body must be {\"prompt\": string}");
  }
  const auto text = body["prompt"].get<std::string>();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return error(400, "prompt is empty");

  auto entry = std::make_shared<Entry>();
  std::string id;
  {
    std::unique_lock lock(map_mu_);
    for (int tries = 0; tries < 16; ++tries) {
      id = ids_();
      if (valid_session_id(id) && !sessions_.count(id) &&
          !std::filesystem::exists(store_.path_for(id))) {
        break;
      }
      id.clear();
    }
    if (id.empty()) return error(500, "could not allocate a session id");
    entry->state = DialogueState::fresh(id);
    entry->log = std::make_unique<EventLog>(store_.path_for(id), id);
    sessions_[id] = entry;
  }

  std::lock_guard write(entry->write_mu);
  const auto prompt = UserPrompt::make(text, clock_->wall_now());
  const auto state = pipeline_.start(id, prompt, sink_for(*entry));
  return view_response(state, 201);
}

ServiceResponse SessionService::respond(const std::string& id, const nlohmann::json& body) {
  const auto entry = find(id);
  if (!entry) return error(404, "unknown session " + id);
  std::unique_lock write(entry->write_mu, std::try_to_lock);
  if (!write.owns_lock()) return error(409, "session " + id + " is busy");

  const auto state = current(*entry);
  if (state.status != SessionStatus::AwaitingUserClarification) {
    return error(409, "session is " + std::string(to_string(state.status)) +
                          ", not awaiting clarification");
  }
  if (!body.is_object()) return error(400, "body must be {\"answers\": {question_id: string}}");
  const auto& set = *state.pending_questions();
  ClarificationResponses responses;
  responses.round_index = set.round_index;
  if (const auto it = body.find("answers"); it != body.end() && !it->is_null()) {
    if (!it->is_object()) return error(400, "answers must be an object");
    for (const auto& [qid, value] : it->items()) {
      if (!set.find(qid)) return error(422, "unknown question id " + qid);
      if (!value.is_string()) return error(400, "answer for " + qid + " must be a string");
      responses.answers[qid] = value.get<std::string>();
    }
  }
  const auto next = pipeline_.respond(state, std::move(responses), sink_for(*entry));
  return view_response(next, 200);
}

ServiceResponse SessionService::get(const std::string& id) const {
  const auto entry = find(id);
  if (!entry) return error(404, "unknown session " + id);
  return {200, session_view(current(*entry))};
}

ServiceResponse SessionService::health() const {
  std::shared_lock lock(map_mu_);
  return {200, {{"status", "ok"}, {"sessions", sessions_.size()}, {"corrupt_logs", corrupt_}}};
}

std::optional<DialogueState> SessionService::snapshot(const std::string& id) const {
  const auto entry = find(id);
  if (!entry) return std::nullopt;
  return current(*entry);
}

int SessionService::recover() {
  int loaded = 0;
  for (const auto& id : store_.session_ids()) {
    if (find(id)) continue;
    const auto path = store_.path_for(id);
    DialogueState state;
    std::int64_t next_seq = 0;
    try {
      const auto events = read_event_log(path);
      state = replay(events);
      next_seq = events.back().sequence_no + 1;
    } catch (const CorruptLog& e) {
      std::unique_lock lock(map_mu_);
      corrupt_.push_back(id + ": " + e.what());
      continue;
    }
    auto entry = std::make_shared<Entry>();
    entry->state = state;
    entry->log = std::make_unique<EventLog>(path, id, next_seq);
    {
      std::unique_lock lock(map_mu_);
      sessions_[id] = entry;
    }
    if (state.status == SessionStatus::AwaitingClassification ||
        state.status == SessionStatus::Answering) {
      std::lock_guard write(entry->write_mu);
      (void)pipeline_.advance(state, sink_for(*entry));
    }
    ++loaded;
  }
  return loaded;
}

}  // namespace clarify

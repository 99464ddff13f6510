#include "clarify/service/batch.hpp"

#include <algorithm>
#include <atomic>
#include <ostream>
#include <set>
#include <thread>

#include "clarify/core/transcript.hpp"
#include "clarify/errors.hpp"
#include "clarify/service/session_service.hpp"
#include "clarify/util/jsonl.hpp"

namespace clarify {

std::vector<BatchPrompt> load_batch_prompts(const std::filesystem::path& path) {
  std::vector<BatchPrompt> out;
  std::set<std::string> ids;
  for (const auto& line : read_jsonl(path)) {
    const auto where = path.string() + ":" + std::to_string(line.line_no) + ": ";
    const auto& j = line.value;
    if (!j.is_object() || !j.contains("prompt") || !j["prompt"].is_string()) {
      throw PreconditionError(where + "expected {\"id\", \"prompt\", \"intent\"}");
    }
    BatchPrompt p;
    p.id = j.value("id", std::to_string(out.size() + 1));
    p.prompt = j["prompt"].get<std::string>();
    p.intent = j.value("intent", p.prompt);
    if (p.prompt.find_first_not_of(" \t\r\n") == std::string::npos) {
      throw PreconditionError(where + "empty prompt");
    }
    if (!ids.insert(p.id).second) throw PreconditionError(where + "duplicate id " + p.id);
    out.push_back(std::move(p));
  }
  return out;
}

nlohmann::json run_batch_item(const Runtime& runtime, const BatchPrompt& item, bool baseline) {
  if (!runtime.simulated_user) throw ConfigError("batch runs need a simulated_user stage");
  const auto pipeline = runtime.pipeline();
  const auto& clock = *runtime.clock;
  const auto t0 = clock.now();

  std::optional<std::string> user_failure;
  auto state = pipeline.start(item.id.empty() ? "batch" : item.id,
                              UserPrompt::make(item.prompt, clock.wall_now()));
  while (const auto* pending = state.pending_questions()) {
    ClarificationResponses responses;
    try {
      responses = simulate_user(*runtime.simulated_user, item.prompt, item.intent, *pending);
    } catch (const BackendError& e) {
      user_failure = std::string("simulated_user: ") + e.what();
      break;
    }
    state = pipeline.respond(state, std::move(responses));
  }
  const auto wall = std::chrono::duration<double, std::milli>(clock.now() - t0).count();

  auto view = session_view(state);
  nlohmann::json record{{"id", item.id},
                        {"prompt", item.prompt},
                        {"intent", item.intent},
                        {"status", view["status"]},
                        {"rounds", state.round_count},
                        {"turns", view["rounds"]},
                        {"transcript", assemble_context(state)},
                        {"answer", state.final_answer ? nlohmann::json(*state.final_answer) : nlohmann::json()},
                        {"stage_timings", view["stage_timings"]},
                        {"wall_ms", wall}};
  if (state.failure) record["failure"] = *state.failure;
  if (user_failure) record["failure"] = *user_failure;
  if (baseline) {
    try {
      record["baseline_answer"] = answer_baseline(runtime.deps.answerer, *state.prompt);
    } catch (const BackendError& e) {
      record["baseline_answer"] = nullptr;
      record["baseline_failure"] = e.what();
    }
  }
  return record;
}

int cli_batch(const Runtime& runtime, const std::filesystem::path& in,
              const std::filesystem::path& out, const BatchOptions& options, std::ostream& err) {
  if (!runtime.simulated_user) {
    err << "error: batch needs a simulated_user stage in the config\n";
    return 2;
  }
  std::vector<BatchPrompt> prompts;
  try {
    prompts = load_batch_prompts(in);
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  std::vector<nlohmann::json> records(prompts.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < prompts.size(); i = next++) {
      records[i] = run_batch_item(runtime, prompts[i], options.baseline);
    }
  };
  const auto jobs = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(options.jobs, 1)), 1,
                                            std::max<std::size_t>(prompts.size(), 1));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < jobs; ++t) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();

  std::string body;
  std::string items;
  int answered = 0;
  for (const auto& r : records) {
    body += r.dump() + "\n";
    if (r["status"] == "answered") ++answered;
    if (options.items_out && r["answer"].is_string() && r.contains("baseline_answer") &&
        r["baseline_answer"].is_string()) {
      items += nlohmann::json{{"item_id", r["id"]},
                              {"prompt", r["prompt"]},
                              {"ours", r["answer"]},
                              {"baseline", r["baseline_answer"]}}
                   .dump() +
               "\n";
    }
  }
  write_text_file(out, body);
  if (options.items_out) write_text_file(*options.items_out, items);
  err << "batch: " << records.size() << " prompts, " << answered << " answered\n";
  return 0;
}

}  // namespace clarify

#include "clarify/datagen/generators.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "clarify/errors.hpp"
#include "clarify/util/jsonl.hpp"

namespace clarify {

namespace {

struct Stored {
  std::map<int, nlohmann::json> records;
  std::map<int, AttemptOutcome> failures;

  GenerationCampaignReport report() const {
    GenerationCampaignReport r;
    r.parsed = static_cast<int>(records.size());
    for (const auto& [i, outcome] : failures) {
      (outcome == AttemptOutcome::FailedTimeout ? r.failed_timeout : r.failed_parse)++;
    }
    r.attempted = r.parsed + r.failed_parse + r.failed_timeout;
    return r;
  }
};

// Drops a trailing partial line left by an interrupted writer.
void repair_tail(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return;
  const auto text = read_text_file(path);
  if (text.empty() || text.back() == '\n') return;
  const auto keep = text.rfind('\n');
  std::filesystem::resize_file(path, keep == std::string::npos ? 0 : keep + 1);
}

int index_of(const nlohmann::json& j) {
  const auto it = j.find("index");
  if (it == j.end() || !it->is_number_integer()) return -1;
  return it->get<int>();
}

Stored load_stored(const std::filesystem::path& out, std::string_view schema, int n) {
  Stored s;
  repair_tail(out);
  repair_tail(failures_path(out));
  if (std::filesystem::exists(out) && std::filesystem::file_size(out) > 0) {
    const auto lines = read_jsonl(out);
    if (lines.front().value.value("schema", "") != schema) {
      throw ConfigError(out.string() + " holds a different dataset schema");
    }
    for (std::size_t k = 1; k < lines.size(); ++k) {
      const int i = index_of(lines[k].value);
      if (i >= 0 && i < n) s.records[i] = lines[k].value;
    }
  }
  if (std::filesystem::exists(failures_path(out))) {
    for (const auto& line : read_jsonl(failures_path(out))) {
      const int i = index_of(line.value);
      if (i < 0 || i >= n || s.records.count(i)) continue;
      s.failures[i] = line.value.value("kind", "") == "timeout" ? AttemptOutcome::FailedTimeout
                                                                 : AttemptOutcome::FailedParse;
    }
  }
  return s;
}

Stored run_stored(std::string_view schema, int n, const DatagenOptions& options,
                  const std::function<AttemptRecord(int)>& attempt) {
  if (n <= 0) throw PreconditionError("campaign size n must be > 0");
  Stored stored;
  std::optional<JsonlAppender> data;
  std::optional<JsonlAppender> fails;
  if (options.out) {
    const auto& out = *options.out;
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    stored = load_stored(out, schema, n);
    const bool fresh = !std::filesystem::exists(out) || std::filesystem::file_size(out) == 0;
    data.emplace(out, false);
    if (fresh) data->append(dataset_header(schema));
    fails.emplace(failures_path(out), false);
  }

  std::set<int> skip;
  for (const auto& [i, r] : stored.records) skip.insert(i);
  for (const auto& [i, f] : stored.failures) skip.insert(i);

  run_campaign(n, options.width, attempt,
               [&](const AttemptRecord& r) {
                 if (r.outcome == AttemptOutcome::Parsed) {
                   if (data) data->append(r.example);
                   stored.records[r.index] = r.example;
                 } else {
                   if (fails) {
                     fails->append({{"index", r.index},
                                    {"kind", to_string(r.outcome)},
                                    {"detail", r.detail}});
                   }
                   stored.failures[r.index] = r.outcome;
                 }
               },
               skip);

  if (options.out) {
    write_text_file(report_path(*options.out), to_json(stored.report()).dump(2) + "\n");
  }
  return stored;
}

// Shared request/fault handling for one teacher call.
template <typename Parse>
AttemptRecord teacher_attempt(ChatClient& teacher, ChatRequest request, int index, Parse parse) {
  AttemptRecord r;
  r.index = index;
  try {
    const auto reply = teacher.complete(request);
    std::string why;
    if (auto example = parse(reply.text, &why)) {
      r.example = *example;
    } else {
      r.outcome = AttemptOutcome::FailedParse;
      r.detail = why;
    }
  } catch (const BackendExhausted& e) {
    r.outcome = AttemptOutcome::FailedTimeout;
    r.detail = e.what();
  } catch (const InvalidResponse& e) {
    r.outcome = AttemptOutcome::FailedParse;
    r.detail = e.what();
  }
  return r;
}

void check_teacher(const std::shared_ptr<ChatClient>& teacher) {
  if (!teacher) throw ConfigError("datagen needs a teacher backend");
}

}  // namespace

std::filesystem::path failures_path(const std::filesystem::path& out) {
  auto p = out;
  p += ".failures.jsonl";
  return p;
}

std::filesystem::path report_path(const std::filesystem::path& out) {
  auto p = out;
  p += ".report.json";
  return p;
}

void CategoryMix::validate() const {
  if (code_only < 0 || natural_language < 0 || std::abs(code_only + natural_language - 1.0) > 1e-9) {
    throw PreconditionError("category mix must be two non-negative shares summing to 1");
  }
}

ClarificationCategory category_for(int index, const CategoryMix& mix) {
  // The slack keeps shares like 0.7 from losing a count to rounding.
  const double p = mix.code_only;
  const auto before = std::floor(static_cast<double>(index) * p + 1e-9);
  const auto after = std::floor(static_cast<double>(index + 1) * p + 1e-9);
  return after > before ? ClarificationCategory::CodeOnlyUnderspecified
                        : ClarificationCategory::NaturalLanguageCodeRelated;
}

int target_label_for(int index) { return index % 4 + 1; }

ClassifierDataset generate_classifier_dataset(const std::shared_ptr<ChatClient>& teacher,
                                              const PromptTemplate& tpl, int n,
                                              const DatagenOptions& options) {
  check_teacher(teacher);
  tpl.require_slots_within({"target_label", "index"});
  auto attempt = [&](int i) {
    auto request = make_request(
        tpl.render({{"target_label", std::to_string(target_label_for(i))}, {"index", std::to_string(i)}}));
    request.temperature = 1.0;
    request.max_output_tokens = 512;
    request.correlation_id = "classifier:" + std::to_string(i);
    return teacher_attempt(*teacher, std::move(request), i,
                           [i](std::string_view text, std::string* why) -> std::optional<nlohmann::json> {
                             auto e = parse_classifier_reply(text, why);
                             if (!e) return std::nullopt;
                             return to_json(*e, i);
                           });
  };
  const auto stored = run_stored(kClassifierSchema, n, options, attempt);
  ClassifierDataset out;
  out.report = stored.report();
  for (const auto& [i, j] : stored.records) out.examples.push_back(classifier_example_from_json(j));
  return out;
}

ClarificationDataset generate_clarification_dataset(const std::shared_ptr<ChatClient>& teacher,
                                                    const PromptTemplate& tpl, int n,
                                                    const CategoryMix& mix,
                                                    const DatagenOptions& options) {
  check_teacher(teacher);
  mix.validate();
  tpl.require_slots_within({"category", "index"});
  auto attempt = [&](int i) {
    const auto category = category_for(i, mix);
    auto request = make_request(
        tpl.render({{"category", std::string(to_string(category))}, {"index", std::to_string(i)}}));
    request.temperature = 1.0;
    request.max_output_tokens = 768;
    request.correlation_id = "clarification:" + std::to_string(i);
    return teacher_attempt(
        *teacher, std::move(request), i,
        [i, category](std::string_view text, std::string* why) -> std::optional<nlohmann::json> {
          auto e = parse_clarification_reply(text, category, why);
          if (!e) return std::nullopt;
          return to_json(*e, i);
        });
  };
  const auto stored = run_stored(kClarificationSchema, n, options, attempt);
  ClarificationDataset out;
  out.report = stored.report();
  for (const auto& [i, j] : stored.records) out.examples.push_back(clarification_example_from_json(j));
  return out;
}

}  // namespace clarify

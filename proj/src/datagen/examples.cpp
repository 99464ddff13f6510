#include "clarify/datagen/examples.hpp"

#include <set>

#include "clarify/errors.hpp"
#include "clarify/util/jsonl.hpp"

namespace clarify {

namespace {

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

std::optional<nlohmann::json> single_object(std::string_view reply, std::string* why) {
  auto fail = [&](std::string reason) -> std::optional<nlohmann::json> {
    if (why) *why = std::move(reason);
    return std::nullopt;
  };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(reply);
  } catch (const nlohmann::json::parse_error& e) {
    return fail(std::string("not a single JSON value: ") + e.what());
  }
  if (!j.is_object()) return fail("reply is JSON but not an object");
  return j;
}

std::optional<std::string> prompt_field(const nlohmann::json& j, std::string* why) {
  const auto it = j.find("prompt");
  if (it == j.end() || !it->is_string() || blank(it->get_ref<const std::string&>())) {
    if (why) *why = "missing or empty \"prompt\"";
    return std::nullopt;
  }
  return it->get<std::string>();
}

std::optional<std::vector<std::string>> questions_field(const nlohmann::json& j, std::string* why) {
  const auto it = j.find("questions");
  if (it == j.end() || !it->is_array() || it->empty()) {
    if (why) *why = "missing or empty \"questions\"";
    return std::nullopt;
  }
  std::vector<std::string> out;
  for (const auto& q : *it) {
    if (!q.is_string() || blank(q.get_ref<const std::string&>())) {
      if (why) *why = "\"questions\" must hold non-empty strings";
      return std::nullopt;
    }
    out.push_back(q.get<std::string>());
  }
  return out;
}

std::optional<int> label_field(const nlohmann::json& j, std::string* why) {
  const auto it = j.find("label");
  if (it == j.end() || !it->is_number_integer()) {
    if (why) *why = "missing or non-integer \"label\"";
    return std::nullopt;
  }
  const int label = it->get<int>();
  if (label < 1 || label > 4) {
    if (why) *why = "label " + std::to_string(label) + " outside 1..4";
    return std::nullopt;
  }
  return label;
}

}  // namespace

std::string_view to_string(ClarificationCategory category) {
  return category == ClarificationCategory::CodeOnlyUnderspecified ? "code_only_underspecified"
                                                                   : "natural_language_code_related";
}

ClarificationCategory category_from_string(std::string_view s) {
  if (s == "code_only_underspecified") return ClarificationCategory::CodeOnlyUnderspecified;
  if (s == "natural_language_code_related") return ClarificationCategory::NaturalLanguageCodeRelated;
  throw PreconditionError("unknown category: " + std::string(s));
}

nlohmann::json to_json(const GenerationCampaignReport& r) {
  return {{"attempted", r.attempted},
          {"parsed", r.parsed},
          {"failed_parse", r.failed_parse},
          {"failed_timeout", r.failed_timeout},
          {"parse_rate", r.parse_rate()}};
}

std::optional<ClassifierExample> parse_classifier_reply(std::string_view reply, std::string* why) {
  const auto j = single_object(reply, why);
  if (!j) return std::nullopt;
  auto prompt = prompt_field(*j, why);
  if (!prompt) return std::nullopt;
  const auto label = label_field(*j, why);
  if (!label) return std::nullopt;
  return ClassifierExample{std::move(*prompt), *label};
}

std::optional<ClarificationExample> parse_clarification_reply(std::string_view reply,
                                                              ClarificationCategory category,
                                                              std::string* why) {
  const auto j = single_object(reply, why);
  if (!j) return std::nullopt;
  auto prompt = prompt_field(*j, why);
  if (!prompt) return std::nullopt;
  auto questions = questions_field(*j, why);
  if (!questions) return std::nullopt;
  return ClarificationExample{std::move(*prompt), std::move(*questions), category};
}

nlohmann::json dataset_header(std::string_view schema) {
  return {{"schema", schema}, {"version", kDatasetVersion}};
}

nlohmann::json to_json(const ClassifierExample& e, int index) {
  return {{"index", index}, {"prompt", e.prompt}, {"label", e.clarity_label}};
}

nlohmann::json to_json(const ClarificationExample& e, int index) {
  return {{"index", index},
          {"prompt", e.prompt},
          {"questions", e.questions},
          {"category", to_string(e.category)}};
}

ClassifierExample classifier_example_from_json(const nlohmann::json& j) {
  std::string why;
  auto prompt = prompt_field(j, &why);
  const auto label = prompt ? label_field(j, &why) : std::nullopt;
  if (!prompt || !label) throw PreconditionError(why);
  return {std::move(*prompt), *label};
}

ClarificationExample clarification_example_from_json(const nlohmann::json& j) {
  std::string why;
  auto prompt = prompt_field(j, &why);
  auto questions = prompt ? questions_field(j, &why) : std::nullopt;
  if (!prompt || !questions) throw PreconditionError(why);
  const auto it = j.find("category");
  if (it == j.end() || !it->is_string()) throw PreconditionError("missing \"category\"");
  return {std::move(*prompt), std::move(*questions), category_from_string(it->get<std::string>())};
}

DatasetValidation validate_dataset(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw PreconditionError("cannot open " + path.string());
  DatasetValidation v;
  std::set<long long> indices;
  bool first = true;
  scan_jsonl(
      path,
      [&](int line, const nlohmann::json& j) {
        if (first) {
          first = false;
          const auto schema = j.is_object() ? j.find("schema") : j.end();
          if (j.is_object() && schema != j.end() && schema->is_string()) {
            v.schema = schema->get<std::string>();
            if (v.schema != kClassifierSchema && v.schema != kClarificationSchema) {
              v.violations.push_back({line, "unknown schema " + v.schema});
            }
            if (j.value("version", 0) != kDatasetVersion) {
              v.violations.push_back({line, "unsupported schema version"});
            }
            return;
          }
          v.violations.push_back({line, "missing schema header line"});
        }
        ++v.records;
        if (!j.is_object()) {
          v.violations.push_back({line, "record is not a JSON object"});
          return;
        }
        const auto idx = j.find("index");
        if (idx == j.end() || !idx->is_number_integer() || idx->get<long long>() < 0) {
          v.violations.push_back({line, "missing or negative \"index\""});
        } else if (!indices.insert(idx->get<long long>()).second) {
          v.violations.push_back({line, "duplicate index " + std::to_string(idx->get<long long>())});
        }
        try {
          if (v.schema == kClarificationSchema) {
            (void)clarification_example_from_json(j);
          } else if (v.schema == kClassifierSchema) {
            (void)classifier_example_from_json(j);
          }
        } catch (const PreconditionError& e) {
          v.violations.push_back({line, e.what()});
        }
      },
      [&](int line, const std::string& error) {
        first = false;
        v.violations.push_back({line, "unparseable line: " + error});
      });
  if (first) v.violations.push_back({0, "file is empty (no schema header)"});
  return v;
}

namespace {

template <typename Example, typename Parse>
std::vector<Example> load_dataset(const std::filesystem::path& path, std::string_view schema,
                                  Parse parse) {
  const auto v = validate_dataset(path);
  if (v.schema != schema) {
    throw PreconditionError(path.string() + ": expected schema " + std::string(schema));
  }
  if (!v.ok()) {
    const auto& first = v.violations.front();
    throw PreconditionError(path.string() + ":" + std::to_string(first.line) + ": " + first.message);
  }
  std::vector<Example> out;
  const auto lines = read_jsonl(path);
  for (std::size_t i = 1; i < lines.size(); ++i) out.push_back(parse(lines[i].value));
  return out;
}

}  // namespace

std::vector<ClassifierExample> load_classifier_dataset(const std::filesystem::path& path) {
  return load_dataset<ClassifierExample>(path, kClassifierSchema, classifier_example_from_json);
}

std::vector<ClarificationExample> load_clarification_dataset(const std::filesystem::path& path) {
  return load_dataset<ClarificationExample>(path, kClarificationSchema,
                                            clarification_example_from_json);
}

std::string numbered_questions(const std::vector<std::string>& questions) {
  std::string out;
  for (std::size_t k = 0; k < questions.size(); ++k) {
    if (k) out += '\n';
    out += std::to_string(k + 1) + ". " + questions[k];
  }
  return out;
}

void export_finetune_format(const std::vector<ClarificationExample>& examples,
                            const std::filesystem::path& out) {
  std::string body;
  for (const auto& e : examples) {
    const nlohmann::json record{
        {"messages",
         {{{"role", "user"}, {"content", e.prompt}},
          {{"role", "assistant"}, {"content", numbered_questions(e.questions)}}}}};
    body += record.dump() + "\n";
  }
  write_text_file(out, body);
}

std::vector<FinetunePair> import_finetune_format(const std::filesystem::path& path) {
  std::vector<FinetunePair> out;
  for (const auto& line : read_jsonl(path)) {
    const auto& msgs = line.value.at("messages");
    if (msgs.size() != 2) {
      throw PreconditionError(path.string() + ":" + std::to_string(line.line_no) +
                              ": expected 2 messages");
    }
    FinetunePair pair;
    pair.prompt = msgs.at(0).at("content").get<std::string>();
    const auto text = msgs.at(1).at("content").get<std::string>();
    std::size_t pos = 0;
    int k = 1;
    while (pos < text.size()) {
      auto end = text.find('\n', pos);
      if (end == std::string::npos) end = text.size();
      const auto item = text.substr(pos, end - pos);
      const auto prefix = std::to_string(k) + ". ";
      if (!item.starts_with(prefix)) {
        throw PreconditionError(path.string() + ":" + std::to_string(line.line_no) +
                                ": assistant turn is not a numbered list");
      }
      pair.questions.push_back(item.substr(prefix.size()));
      ++k;
      pos = end + 1;
    }
    out.push_back(std::move(pair));
  }
  return out;
}

void export_classifier_format(const std::vector<ClassifierExample>& examples,
                              const std::filesystem::path& out) {
  std::string body;
  for (const auto& e : examples) {
    body += nlohmann::json{{"text", e.prompt}, {"label", e.clarity_label}}.dump() + "\n";
  }
  write_text_file(out, body);
}

}  // namespace clarify

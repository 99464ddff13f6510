#include <doctest.h>

#include <fstream>
#include <random>
#include <thread>

#include "clarify/datagen/campaign.hpp"
#include "clarify/datagen/generators.hpp"
#include "clarify/datagen/synthetic_teacher.hpp"
#include "clarify/errors.hpp"
#include "clarify/util/jsonl.hpp"
#include "support/stubs.hpp"
#include "support/temp_dir.hpp"

using namespace clarify;
namespace ct = clarify::testing;

namespace {

struct Teacher {
  std::shared_ptr<StubTransport> transport;
  std::shared_ptr<ChatClient> client;
};

Teacher synthetic(SyntheticTeacherOptions opts, int max_retries = 2) {
  auto transport = make_synthetic_teacher(std::move(opts));
  auto client = std::make_shared<ChatClient>(ct::fast_config(max_retries), transport,
                                             ChatClient::Options{nullptr, nullptr, 1});
  return {transport, client};
}

Teacher responder(StubTransport::Responder fn, int max_retries = 1) {
  auto transport = std::make_shared<StubTransport>(std::move(fn));
  auto client = std::make_shared<ChatClient>(ct::fast_config(max_retries), transport,
                                             ChatClient::Options{nullptr, nullptr, 1});
  return {transport, client};
}

PromptTemplate classifier_tpl() { return PromptTemplate::builtin("datagen_classifier"); }
PromptTemplate clarification_tpl() { return PromptTemplate::builtin("datagen_clarification"); }

std::string slurp(const std::filesystem::path& p) { return read_text_file(p); }

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  write_text_file(p, text);
}

// Keeps the header and the records whose index is below `cutoff`.
void truncate_by_index(const std::filesystem::path& p, int cutoff, bool has_header) {
  std::vector<std::string> kept;
  bool first = has_header;
  for (const auto& line : read_jsonl(p)) {
    if (first) {
      kept.push_back(line.value.dump());
      first = false;
      continue;
    }
    if (line.value["index"].get<int>() < cutoff) kept.push_back(line.value.dump());
  }
  write_lines(p, kept);
}

}  // namespace

TEST_CASE("valid teacher yields every example") {
  auto t = synthetic({});
  auto ds = generate_classifier_dataset(t.client, classifier_tpl(), 10);
  CHECK(ds.examples.size() == 10);
  CHECK(ds.report.attempted == 10);
  CHECK(ds.report.parsed == 10);
  CHECK(ds.report.parse_rate() == 1.0);
  CHECK(ds.report.balanced());
  for (const auto& e : ds.examples) {
    CHECK(e.clarity_label >= 1);
    CHECK(e.clarity_label <= 4);
    CHECK_FALSE(e.prompt.empty());
  }
}

TEST_CASE("timeouts are counted and the campaign continues") {
  auto t = synthetic({.timeout_indices = {0, 2}});
  auto ds = generate_classifier_dataset(t.client, classifier_tpl(), 4);
  CHECK(ds.examples.size() == 2);
  CHECK(ds.report.parsed == 2);
  CHECK(ds.report.failed_timeout == 2);
  CHECK(ds.report.failed_parse == 0);
  CHECK(ds.report.balanced());
  // each timed-out index was retried to exhaustion
  CHECK(t.transport->calls() == 2 + 2 * 3);
}

TEST_CASE("malformed replies are counted as parse failures") {
  auto t = synthetic({.malformed_rate = 0.3, .timeout_indices = {}, .seed = 8});
  auto ds = generate_clarification_dataset(t.client, clarification_tpl(), 400);
  CHECK(ds.report.balanced());
  CHECK(ds.report.failed_parse > 80);
  CHECK(ds.report.failed_parse < 160);
  CHECK(ds.report.parsed == static_cast<int>(ds.examples.size()));
}

TEST_CASE("seeded campaigns are reproducible") {
  SyntheticTeacherOptions opts{.malformed_rate = 0.2, .timeout_rate = 0.05, .timeout_indices = {}, .seed = 77};
  auto a = generate_classifier_dataset(synthetic(opts).client, classifier_tpl(), 200);
  auto b = generate_classifier_dataset(synthetic(opts).client, classifier_tpl(), 200,
                                       {.width = 1, .out = std::nullopt});
  CHECK(a.report == b.report);
  CHECK(a.examples == b.examples);
}

TEST_CASE("category split follows the mix") {
  auto t = synthetic({});
  auto ds = generate_clarification_dataset(t.client, clarification_tpl(), 10);
  int code = 0;
  for (const auto& e : ds.examples) code += e.category == ClarificationCategory::CodeOnlyUnderspecified;
  CHECK(code == 5);
  CHECK(ds.examples.size() - code == 5);

  auto one = generate_clarification_dataset(t.client, clarification_tpl(), 1);
  CHECK(one.report.attempted == 1);
  CHECK(one.examples.size() == 1);
}

TEST_CASE("both categories appear for n >= 2 under the default mix") {
  CategoryMix mix;
  for (int n = 2; n <= 64; ++n) {
    int code = 0;
    for (int i = 0; i < n; ++i) code += category_for(i, mix) == ClarificationCategory::CodeOnlyUnderspecified;
    CHECK(code >= 1);
    CHECK(code <= n - 1);
  }
}

TEST_CASE("category counts equal floor(n * p) for any mix") {
  for (int tenths = 0; tenths <= 10; ++tenths) {
    const double p = tenths / 10.0;
    CategoryMix mix{p, 1.0 - p};
    int code = 0;
    for (int n = 1; n <= 300; ++n) {
      code += category_for(n - 1, mix) == ClarificationCategory::CodeOnlyUnderspecified;
      CHECK(code == n * tenths / 10);
    }
  }
  CHECK_THROWS_AS((CategoryMix{0.6, 0.6}.validate()), PreconditionError);
  CHECK_THROWS_AS((CategoryMix{-0.1, 1.1}.validate()), PreconditionError);
}

TEST_CASE("classifier reply parsing is strict") {
  CHECK(parse_classifier_reply(R"({"prompt": "sort it", "label": 2})") ==
        ClassifierExample{"sort it", 2});
  CHECK(parse_classifier_reply("  {\"prompt\": \"x\", \"label\": 4}\n"));
  std::string why;
  CHECK_FALSE(parse_classifier_reply(R"(Here you go: {"prompt": "x", "label": 2})", &why));
  CHECK_FALSE(why.empty());
  CHECK_FALSE(parse_classifier_reply("```json\n{\"prompt\": \"x\", \"label\": 2}\n```"));
  CHECK_FALSE(parse_classifier_reply(R"({"prompt": "x", "label": 2}{"prompt": "y", "label": 3})"));
  CHECK_FALSE(parse_classifier_reply(R"({"prompt": "x", "label": 5})"));
  CHECK_FALSE(parse_classifier_reply(R"({"prompt": "x", "label": "2"})"));
  CHECK_FALSE(parse_classifier_reply(R"({"prompt": " ", "label": 2})"));
  CHECK_FALSE(parse_classifier_reply(R"([1, 2])"));
}

TEST_CASE("clarification reply parsing is strict") {
  auto ok = parse_clarification_reply(R"({"prompt": "p", "questions": ["a?", "b?"]})",
                                      ClarificationCategory::NaturalLanguageCodeRelated);
  REQUIRE(ok);
  CHECK(ok->questions.size() == 2);
  CHECK(ok->category == ClarificationCategory::NaturalLanguageCodeRelated);
  CHECK_FALSE(parse_clarification_reply(R"({"prompt": "p", "questions": []})",
                                        ClarificationCategory::CodeOnlyUnderspecified));
  CHECK_FALSE(parse_clarification_reply(R"({"prompt": "p", "questions": "a?"})",
                                        ClarificationCategory::CodeOnlyUnderspecified));
  CHECK_FALSE(parse_clarification_reply(R"({"questions": ["a?"]})",
                                        ClarificationCategory::CodeOnlyUnderspecified));
}

TEST_CASE("dataset validation") {
  ct::TempDir dir("clarify-validate");
  const auto header = dataset_header(kClassifierSchema).dump();
  const auto clean = dir / "clean.jsonl";
  write_lines(clean, {header, to_json(ClassifierExample{"a", 1}, 0).dump(),
                      to_json(ClassifierExample{"b", 4}, 1).dump()});
  auto v = validate_dataset(clean);
  CHECK(v.ok());
  CHECK(v.records == 2);
  CHECK(v.schema == kClassifierSchema);

  const auto bad_label = dir / "label.jsonl";
  write_lines(bad_label, {header, to_json(ClassifierExample{"a", 1}, 0).dump(),
                          R"({"index": 1, "prompt": "b", "label": 5})"});
  auto lv = validate_dataset(bad_label);
  REQUIRE(lv.violations.size() == 1);
  CHECK(lv.violations[0].line == 3);

  const auto empty_q = dir / "questions.jsonl";
  write_lines(empty_q, {dataset_header(kClarificationSchema).dump(),
                        R"({"index": 0, "prompt": "p", "questions": [], "category": "code_only_underspecified"})"});
  auto qv = validate_dataset(empty_q);
  REQUIRE(qv.violations.size() == 1);
  CHECK(qv.violations[0].line == 2);

  const auto dup = dir / "dup.jsonl";
  write_lines(dup, {header, to_json(ClassifierExample{"a", 1}, 0).dump(),
                    to_json(ClassifierExample{"b", 2}, 0).dump()});
  CHECK(validate_dataset(dup).violations.size() == 1);

  const auto no_header = dir / "noheader.jsonl";
  write_lines(no_header, {to_json(ClassifierExample{"a", 1}, 0).dump()});
  auto hv = validate_dataset(no_header);
  CHECK_FALSE(hv.ok());
  CHECK(hv.schema.empty());

  CHECK_THROWS_AS(load_classifier_dataset(bad_label), PreconditionError);
  CHECK_THROWS_AS(validate_dataset(dir / "missing.jsonl"), PreconditionError);
}

TEST_CASE("fine-tune export round-trips") {
  ct::TempDir dir("clarify-export");
  std::vector<ClarificationExample> one{
      {"fix my code", {"Which error do you see?", "Which version?"},
       ClarificationCategory::CodeOnlyUnderspecified}};
  export_finetune_format(one, dir / "one.jsonl");
  const auto lines = read_jsonl(dir / "one.jsonl");
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].value["messages"].size() == 2);
  CHECK(lines[0].value["messages"][0]["role"] == "user");
  CHECK(lines[0].value["messages"][1]["content"] == "1. Which error do you see?\n2. Which version?");
  auto back = import_finetune_format(dir / "one.jsonl");
  REQUIRE(back.size() == 1);
  CHECK(back[0] == FinetunePair{one[0].prompt, one[0].questions});

  auto t = synthetic({.timeout_indices = {}, .seed = 4});
  auto ds = generate_clarification_dataset(t.client, clarification_tpl(), 25);
  export_finetune_format(ds.examples, dir / "many.jsonl");
  auto many = import_finetune_format(dir / "many.jsonl");
  REQUIRE(many.size() == ds.examples.size());
  for (std::size_t i = 0; i < many.size(); ++i) {
    CHECK(many[i].prompt == ds.examples[i].prompt);
    CHECK(many[i].questions == ds.examples[i].questions);
  }

  export_finetune_format({}, dir / "empty.jsonl");
  CHECK(std::filesystem::exists(dir / "empty.jsonl"));
  CHECK(std::filesystem::file_size(dir / "empty.jsonl") == 0);
}

TEST_CASE("classifier export writes text and label") {
  ct::TempDir dir("clarify-export-cls");
  export_classifier_format({{"a", 2}, {"b", 4}}, dir / "cls.jsonl");
  const auto lines = read_jsonl(dir / "cls.jsonl");
  REQUIRE(lines.size() == 2);
  CHECK(lines[1].value == nlohmann::json{{"text", "b"}, {"label", 4}});
}

TEST_CASE("written campaigns validate and reload") {
  ct::TempDir dir("clarify-written");
  const auto out = dir / "cls.jsonl";
  auto t = synthetic({.malformed_rate = 0.2, .timeout_indices = {3}, .seed = 5});
  auto ds = generate_classifier_dataset(t.client, classifier_tpl(), 50, {.width = 4, .out = out});
  CHECK(validate_dataset(out).ok());
  CHECK(load_classifier_dataset(out) == ds.examples);
  const auto report = nlohmann::json::parse(slurp(report_path(out)));
  CHECK(report["attempted"] == 50);
  CHECK(report["parsed"] == ds.report.parsed);
  CHECK(read_jsonl(failures_path(out)).size() ==
        static_cast<std::size_t>(ds.report.failed_parse + ds.report.failed_timeout));
}

TEST_CASE("resuming a partial campaign reproduces the full output") {
  ct::TempDir dir("clarify-resume");
  SyntheticTeacherOptions opts{.malformed_rate = 0.25, .timeout_indices = {4, 17}, .seed = 21};
  const auto full = dir / "full.jsonl";
  generate_clarification_dataset(synthetic(opts).client, clarification_tpl(), 40, {},
                                 {.width = 3, .out = full});

  const auto part = dir / "part.jsonl";
  std::filesystem::copy_file(full, part);
  std::filesystem::copy_file(failures_path(full), failures_path(part));
  truncate_by_index(part, 15, true);
  truncate_by_index(failures_path(part), 15, false);
  // an interrupted writer leaves half a line behind
  {
    std::ofstream torn(part, std::ios::app);
    torn << R"({"index": 15, "prompt": "half)";
  }

  auto resumed_teacher = synthetic(opts);
  auto resumed = generate_clarification_dataset(resumed_teacher.client, clarification_tpl(), 40, {},
                                                {.width = 3, .out = part});
  CHECK(slurp(part) == slurp(full));
  CHECK(slurp(failures_path(part)) == slurp(failures_path(full)));
  CHECK(slurp(report_path(part)) == slurp(report_path(full)));
  CHECK(resumed.report.attempted == 40);

  // a finished campaign makes no further requests
  auto idle = synthetic(opts);
  auto again = generate_clarification_dataset(idle.client, clarification_tpl(), 40, {},
                                              {.width = 3, .out = full});
  CHECK(idle.transport->calls() == 0);
  CHECK(again.report == resumed.report);
}

TEST_CASE("serial and parallel campaigns write identical files") {
  ct::TempDir dir("clarify-width");
  SyntheticTeacherOptions opts{.malformed_rate = 0.168, .timeout_rate = 0.02, .timeout_indices = {}, .seed = 3};
  generate_classifier_dataset(synthetic(opts).client, classifier_tpl(), 120,
                              {.width = 1, .out = dir / "serial.jsonl"});
  generate_classifier_dataset(synthetic(opts).client, classifier_tpl(), 120,
                              {.width = 8, .out = dir / "parallel.jsonl"});
  CHECK(slurp(dir / "serial.jsonl") == slurp(dir / "parallel.jsonl"));
  CHECK(slurp(failures_path(dir / "serial.jsonl")) == slurp(failures_path(dir / "parallel.jsonl")));
}

TEST_CASE("resuming into a file of the other schema is refused") {
  ct::TempDir dir("clarify-schema");
  const auto out = dir / "d.jsonl";
  generate_classifier_dataset(synthetic({}).client, classifier_tpl(), 3, {.width = 1, .out = out});
  CHECK_THROWS_AS(generate_clarification_dataset(synthetic({}).client, clarification_tpl(), 3, {},
                                                 {.width = 1, .out = out}),
                  ConfigError);
}

TEST_CASE("rejected teacher requests abort the campaign") {
  auto t = responder([](const ChatRequest&, int) { return StubStep::failure(AttemptFailure::Rejected); });
  CHECK_THROWS_AS(generate_classifier_dataset(t.client, classifier_tpl(), 5), BackendRejected);
  CHECK_THROWS_AS(generate_classifier_dataset(t.client, classifier_tpl(), 0), PreconditionError);
  CHECK_THROWS_AS(generate_classifier_dataset(nullptr, classifier_tpl(), 1), ConfigError);
}

TEST_CASE("campaign sink sees indices in order") {
  std::mt19937 rng(1);
  std::vector<int> delays;
  for (int i = 0; i < 60; ++i) delays.push_back(static_cast<int>(rng() % 3));
  std::vector<int> seen;
  auto report = run_campaign(
      60, 6,
      [&](int i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(delays[static_cast<std::size_t>(i)]));
        AttemptRecord r;
        r.index = i;
        r.outcome = i % 5 == 0 ? AttemptOutcome::FailedParse : AttemptOutcome::Parsed;
        return r;
      },
      [&](const AttemptRecord& r) { seen.push_back(r.index); }, {7, 8});
  CHECK(seen.size() == 58);
  CHECK(std::is_sorted(seen.begin(), seen.end()));
  CHECK(std::find(seen.begin(), seen.end(), 7) == seen.end());
  CHECK(report.attempted == 58);
  CHECK(report.failed_parse == 12);
  CHECK(report.balanced());
}

TEST_CASE("campaign rethrows an attempt exception") {
  auto run = [](int width) {
    return run_campaign(
        20, width,
        [](int i) -> AttemptRecord {
          if (i == 9) throw ConfigError("boom");
          return AttemptRecord{i, AttemptOutcome::Parsed, {}, {}};
        },
        [](const AttemptRecord&) {});
  };
  CHECK_THROWS_AS(run(1), ConfigError);
  CHECK_THROWS_AS(run(4), ConfigError);
}

TEST_CASE("synthetic teacher decisions depend only on the index") {
  CHECK(datagen_index("classifier:42") == 42);
  CHECK(datagen_index("clarification:0") == 0);
  CHECK(datagen_index("other") == -1);
  SyntheticTeacherOptions opts{.malformed_rate = 0.5, .timeout_indices = {}, .seed = 9};
  auto a = make_synthetic_teacher(opts);
  auto b = make_synthetic_teacher(opts);
  BackendConfig cfg = ct::fast_config();
  for (int i : {5, 1, 3, 5, 0}) {
    auto req = make_request("x");
    req.correlation_id = "classifier:" + std::to_string(i);
    auto ra = a->send(cfg, req);
    auto rb = b->send(cfg, req);
    REQUIRE(ra.reply);
    REQUIRE(rb.reply);
    CHECK(ra.reply->text == rb.reply->text);
  }
}

#include <doctest.h>

#include <random>

#include "clarify/core/transcript.hpp"
#include "clarify/engine/pipeline.hpp"
#include "clarify/errors.hpp"
#include "support/stubs.hpp"

using namespace clarify;
using clarify::testing::answer_first_only;
using clarify::testing::echo_backend;
using clarify::testing::skip_all;
using clarify::testing::stub_backend;
using clarify::testing::stub_pipeline;

namespace {

const char* kTwoQuestions =
    "1. What should the function return?\n"
    "2. What should happen if the API call fails?";

const char* kTodoPrompt =
    "```javascript\n"
    "async function getUserProfile(userId) {\n"
    "  // TODO: fetch user data\n"
    "}\n"
    "```";

UserPrompt prompt(const std::string& text) {
  return UserPrompt::make(text, Timestamp{std::chrono::milliseconds{1000}});
}

int count_stage(const DialogueState& s, Stage stage) {
  int n = 0;
  for (const auto& t : s.stage_timings) n += t.stage == stage;
  return n;
}

ClarifierBinding clarifier_for(const std::shared_ptr<ChatClient>& client, int max_q = 3) {
  ClarifierBinding b;
  b.client = client;
  b.max_questions_per_round = max_q;
  return b;
}

}  // namespace

TEST_CASE("question parser examples") {
  auto two = parse_questions("1. What should the function return?\n2. Which language version?", 3);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == "What should the function return?");
  CHECK(two[1] == "Which language version?");

  auto five = parse_questions("1. a?\n2. b?\n3. c?\n4. d?\n5. e?", 3);
  CHECK(five == std::vector<std::string>{"a?", "b?", "c?"});
}

TEST_CASE("question parser accepts several list styles") {
  const char* reply =
      "Here are my questions:\n"
      "1) Which framework?\n"
      "(2) Which database?\n"
      "Q3: Any auth?\n"
      "- Should it log?\n"
      "* Is it async?\n"
      "Does it need tests?\n"
      "Thanks for the context.";
  auto qs = parse_questions(reply, 10);
  CHECK(qs == std::vector<std::string>{"Which framework?", "Which database?", "Any auth?",
                                       "Should it log?", "Is it async?", "Does it need tests?"});
}

TEST_CASE("question parser drops duplicates and prose") {
  CHECK(parse_questions("1. Same?\n2. Same?\n3. Other?", 3) ==
        std::vector<std::string>{"Same?", "Other?"});
  CHECK(parse_questions("I cannot help with that.", 3).empty());
  CHECK(parse_questions("", 3).empty());
}

TEST_CASE("generated questions get session-unique ids") {
  auto b = stub_backend({StubStep::text(kTwoQuestions)});
  auto set = generate_questions(clarifier_for(b.client), kTodoPrompt, 2,
                                Timestamp{std::chrono::milliseconds{5}});
  CHECK(set.round_index == 2);
  REQUIRE(set.questions.size() == 2);
  CHECK(set.questions[0].id == "r2-q1");
  CHECK(set.questions[1].id == "r2-q2");
  CHECK(set.questions[1].text == "What should happen if the API call fails?");
  const auto sent = b.transport->requests().at(0).last_user_content();
  CHECK(sent.find("TODO: fetch user data") != std::string::npos);
  CHECK(sent.find("at most 3") != std::string::npos);
}

TEST_CASE("an empty clarifier reply is retried once") {
  auto recover = stub_backend({StubStep::text("Sure."), StubStep::text("1. Why?")});
  auto set = generate_questions(clarifier_for(recover.client), "x", 1, {});
  CHECK(set.questions.size() == 1);
  CHECK(recover.transport->calls() == 2);

  auto never = stub_backend({StubStep::text("Sure.")});
  CHECK_THROWS_AS(generate_questions(clarifier_for(never.client), "x", 1, {}), NoQuestionsParsed);
  CHECK(never.transport->calls() == 2);
}

TEST_CASE("generate_questions preconditions") {
  auto b = echo_backend();
  CHECK_THROWS_AS(generate_questions(clarifier_for(b.client), "x", 0, {}), PreconditionError);
  CHECK_THROWS_AS(generate_questions(clarifier_for(b.client), " ", 1, {}), PreconditionError);
}

TEST_CASE("answering echoes the templated context") {
  auto b = echo_backend();
  AnswererBinding a;
  a.client = b.client;
  CHECK(answer(a, "P\nQ: Q1\nA: A1") == "P\nQ: Q1\nA: A1");
  CHECK_THROWS_AS(answer(a, ""), PreconditionError);
  CHECK_THROWS_AS(answer(a, " \n\t"), PreconditionError);
}

TEST_CASE("answering sends the system preamble and output budget") {
  auto b = echo_backend();
  AnswererBinding a;
  a.client = b.client;
  a.system_preamble = "You are a coding assistant.";
  a.max_output_tokens = 321;
  answer(a, "ctx");
  const auto req = b.transport->requests().at(0);
  REQUIRE(req.messages.size() == 2);
  CHECK(req.messages[0].role == ChatRole::System);
  CHECK(req.messages[0].content == "You are a coding assistant.");
  CHECK(req.max_output_tokens == 321);
}

TEST_CASE("answer output depends only on template and context") {
  auto b1 = echo_backend();
  auto b2 = echo_backend();
  AnswererBinding a1, a2;
  a1.client = b1.client;
  a2.client = b2.client;
  a2.answer_template = PromptTemplate::parse("Task:\n{{context}}\nEnd.");
  CHECK(answer(a1, "ctx") == answer(a1, "ctx"));
  CHECK(answer(a2, "ctx") == "Task:\nctx\nEnd.");
}

TEST_CASE("baseline answering sees only the raw prompt") {
  auto b = echo_backend();
  AnswererBinding a;
  a.client = b.client;
  auto p = prompt("sort a list");
  CHECK(answer_baseline(a, p) == "sort a list");
}

TEST_CASE("enriched context leads the answerer to handle failures") {
  // A responder standing in for a coding assistant: it only emits error
  // handling when the context says what should happen on failure.
  auto transport = std::make_shared<StubTransport>(
      [](const ChatRequest& req, int) {
        const auto& ctx = req.last_user_content();
        if (ctx.find("fails") != std::string::npos && ctx.find("A: ") != std::string::npos) {
          return StubStep::text(
              "async function getUserProfile(userId) {\n  try {\n    const res = await "
              "fetch(`/api/users/${userId}`);\n    return await res.json();\n  } catch (err) {\n"
              "    throw new Error(`profile fetch failed: ${err.message}`);\n  }\n}");
        }
        return StubStep::text("This function returns a user profile.");
      });
  auto client = std::make_shared<ChatClient>(clarify::testing::fast_config(), transport,
                                             ChatClient::Options{nullptr, nullptr, 1});
  auto p = stub_pipeline({1, 4}, kTwoQuestions);
  p.deps.answerer.client = client;
  Pipeline pipeline(p.deps);
  auto s = run_session(pipeline, prompt(kTodoPrompt), [](const ClarificationSet& set) {
    ClarificationResponses r;
    r.answers[set.questions[0].id] = "The profile JSON from the REST endpoint";
    r.answers[set.questions[1].id] = "Throw an error the caller can show";
    return r;
  });
  REQUIRE(s.status == SessionStatus::Answered);
  CHECK(s.final_answer->find("try {") != std::string::npos);
  CHECK(s.final_answer->find("catch") != std::string::npos);
}

TEST_CASE("clear prompt is answered without clarification") {
  auto p = stub_pipeline({4}, kTwoQuestions);
  Pipeline pipeline(p.deps);
  auto s = run_session(pipeline, prompt("Write a Python function that reverses a string."),
                       skip_all());
  CHECK(s.status == SessionStatus::Answered);
  CHECK(s.round_count == 0);
  CHECK(s.classify_calls() == 1);
  CHECK(p.clarifier.transport->calls() == 0);
  CHECK(*s.final_answer == "Write a Python function that reverses a string.");
}

TEST_CASE("partial answer then clear finishes after one round") {
  auto p = stub_pipeline({1, 4}, kTwoQuestions);
  Pipeline pipeline(p.deps);
  auto s = run_session(pipeline, prompt(kTodoPrompt), answer_first_only("JSON from REST endpoint"));
  REQUIRE(s.status == SessionStatus::Answered);
  CHECK(s.round_count == 1);
  CHECK(s.classify_calls() == 2);
  const auto& r = s.rounds[0];
  REQUIRE(r.responses);
  CHECK(r.responses->answers.size() == 1);
  CHECK(r.responses->answers.at("r1-q1") == "JSON from REST endpoint");
  CHECK(*s.final_answer == std::string(kTodoPrompt) +
                               "\nQ: What should the function return?\nA: JSON from REST endpoint"
                               "\nQ: What should happen if the API call fails?");
}

TEST_CASE("always-unclear prompt stops at max_rounds and answers") {
  SessionLimits limits;
  limits.max_rounds = 3;
  auto p = stub_pipeline({1}, kTwoQuestions, limits);
  Pipeline pipeline(p.deps);
  std::vector<std::string> events;
  auto s = run_session(pipeline, prompt("do it"), skip_all(),
                       [&](const PipelineEvent& e, const DialogueState&) {
                         events.emplace_back(event_name(e.payload));
                       });
  CHECK(s.status == SessionStatus::Answered);
  CHECK(s.round_count == 3);
  CHECK(s.classify_calls() == 4);
  CHECK(count_stage(s, Stage::Classify) == 4);
  CHECK(count_stage(s, Stage::Clarify) == 3);
  CHECK(count_stage(s, Stage::Answer) == 1);
  REQUIRE(events.size() >= 2);
  CHECK(events[events.size() - 2] == "threshold_reached");
  CHECK(events.back() == "answer_produced");
  // question ids stay unique across rounds
  CHECK(s.rounds[2].clarification->questions[0].id == "r3-q1");
}

TEST_CASE("zero max_rounds answers after the first classification") {
  SessionLimits limits;
  limits.max_rounds = 0;
  auto p = stub_pipeline({1}, kTwoQuestions, limits);
  Pipeline pipeline(p.deps);
  auto s = run_session(pipeline, prompt("do it"), skip_all());
  CHECK(s.status == SessionStatus::Answered);
  CHECK(s.round_count == 0);
  CHECK(p.clarifier.transport->calls() == 0);
}

TEST_CASE("no parseable questions falls through to an answer") {
  auto p = stub_pipeline({1}, "I am not sure what to ask.");
  Pipeline pipeline(p.deps);
  auto s = run_session(pipeline, prompt("do it"), skip_all());
  CHECK(s.status == SessionStatus::Answered);
  CHECK(s.round_count == 0);
  CHECK(p.clarifier.transport->calls() == 2);
  CHECK(count_stage(s, Stage::Clarify) == 1);
}

TEST_CASE("backend exhaustion aborts the session at the failing stage") {
  SUBCASE("clarifier") {
    auto p = stub_pipeline({1}, kTwoQuestions);
    p.clarifier = stub_backend({StubStep::failure(AttemptFailure::Timeout)},
                               StubExhausted::RepeatLast, nullptr, clarify::testing::fast_config(1));
    p.deps.clarifier.client = p.clarifier.client;
    Pipeline pipeline(p.deps);
    auto s = run_session(pipeline, prompt("do it"), skip_all());
    CHECK(s.status == SessionStatus::Aborted);
    REQUIRE(s.failure);
    CHECK(s.failure->rfind("clarify", 0) == 0);
    CHECK(p.clarifier.transport->calls() == 2);
  }
  SUBCASE("answerer") {
    auto p = stub_pipeline({4}, kTwoQuestions);
    p.answerer = stub_backend({StubStep::failure(AttemptFailure::ServerError)},
                              StubExhausted::RepeatLast, nullptr, clarify::testing::fast_config(0));
    p.deps.answerer.client = p.answerer.client;
    Pipeline pipeline(p.deps);
    auto s = run_session(pipeline, prompt("do it"), skip_all());
    CHECK(s.status == SessionStatus::Aborted);
    CHECK(s.failure->rfind("answer", 0) == 0);
    CHECK_FALSE(s.final_answer);
  }
  SUBCASE("rejection is not retried and still aborts") {
    auto p = stub_pipeline({4}, kTwoQuestions);
    p.answerer = stub_backend({StubStep::failure(AttemptFailure::Rejected)});
    p.deps.answerer.client = p.answerer.client;
    Pipeline pipeline(p.deps);
    CHECK(run_session(pipeline, prompt("x"), skip_all()).status == SessionStatus::Aborted);
    CHECK(p.answerer.transport->calls() == 1);
  }
}

TEST_CASE("respond rejects unknown ids and drops blank answers") {
  auto p = stub_pipeline({1, 4}, kTwoQuestions);
  Pipeline pipeline(p.deps);
  auto s = pipeline.start("s1", prompt("do it"));
  REQUIRE(s.status == SessionStatus::AwaitingUserClarification);
  ClarificationResponses bad;
  bad.round_index = 1;
  bad.answers["r9-q9"] = "x";
  CHECK_THROWS_AS(pipeline.respond(s, bad), IllegalTransition);

  ClarificationResponses blank;
  blank.round_index = 1;
  blank.answers["r1-q1"] = "   ";
  blank.answers["r1-q2"] = "retry twice";
  auto next = pipeline.respond(s, blank);
  CHECK(next.status == SessionStatus::Answered);
  CHECK(next.rounds[0].responses->answers.size() == 1);
  CHECK(next.rounds[0].responses->answers.count("r1-q2") == 1);

  CHECK_THROWS_AS(pipeline.respond(next, blank), IllegalTransition);
}

TEST_CASE("pipeline rejects invalid limits") {
  SessionLimits limits;
  limits.clear_min_level = 5;
  auto p = stub_pipeline({1}, kTwoQuestions, limits);
  CHECK_THROWS_AS(Pipeline{p.deps}, ConfigError);
}

TEST_CASE("sink events replay to the final state") {
  auto p = stub_pipeline({1, 2, 4}, kTwoQuestions);
  Pipeline pipeline(p.deps);
  std::vector<PipelineEvent> log;
  auto s = run_session(pipeline, prompt("do it"), answer_first_only("yes"),
                       [&](const PipelineEvent& e, const DialogueState&) { log.push_back(e); },
                       "abc");
  auto replayed = DialogueState::fresh("abc");
  for (const auto& e : log) replayed = transition(replayed, e);
  CHECK(replayed == s);
}

TEST_CASE("random scripted sessions respect loop invariants") {
  std::mt19937_64 rng(99);
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<int> levels;
    const int len = 1 + pick(6);
    for (int i = 0; i < len; ++i) levels.push_back(1 + pick(4));
    SessionLimits limits;
    limits.max_rounds = pick(5);
    limits.clear_min_level = 2 + pick(3);
    limits.max_questions_per_round = 1 + pick(4);
    std::string reply;
    const int nq = pick(6);
    for (int k = 1; k <= nq; ++k) reply += std::to_string(k) + ". Question " + std::to_string(k) + "?\n";
    if (nq == 0) reply = "nothing to ask";

    auto p = stub_pipeline(levels, reply, limits);
    Pipeline pipeline(p.deps);
    auto respond = [&](const ClarificationSet& set) {
      ClarificationResponses r;
      for (const auto& q : set.questions) {
        if (pick(2)) r.answers[q.id] = "answer " + q.id;
      }
      return r;
    };
    auto s = run_session(pipeline, prompt("task " + std::to_string(trial)), respond);
    CHECK(s.status == SessionStatus::Answered);
    CHECK(s.round_count <= limits.max_rounds);
    CHECK(s.classify_calls() == s.round_count + 1);
    CHECK(count_stage(s, Stage::Classify) == s.classify_calls());
    CHECK(count_stage(s, Stage::Answer) == 1);
    check_invariants(s);
    const auto requests = p.answerer.transport->requests();
    REQUIRE(requests.size() == 1);
    CHECK(requests[0].last_user_content() == assemble_context(s));
    CHECK(*s.final_answer == assemble_context(s));
  }
}

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "clarify/errors.hpp"
#include "clarify/evalkit/perplexity.hpp"
#include "clarify/evalkit/simulated_user.hpp"
#include "clarify/evalkit/statistics.hpp"
#include "clarify/evalkit/study.hpp"
#include "clarify/util/jsonl.hpp"
#include "support/oracles.hpp"
#include "support/stats_fixtures.hpp"
#include "support/stubs.hpp"
#include "support/temp_dir.hpp"

using namespace clarify;
namespace ct = clarify::testing;
using ct::stats_fixtures;

namespace {

std::vector<int> as_ints(const std::vector<double>& x) {
  return {x.begin(), x.end()};
}

std::vector<StudyItem> make_items(int n) {
  std::vector<StudyItem> items;
  for (int i = 0; i < n; ++i) {
    const auto id = "item" + std::to_string(i);
    items.push_back({id, "request " + std::to_string(i), "questions from system one " + id,
                     "questions from system two " + id});
  }
  return items;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("one-sample test matches frozen reference values") {
  for (const auto& f : stats_fixtures()) {
    CAPTURE(f.mean);
    auto r = one_sample_test(f.x, 3.0);
    CHECK(r.n == f.x.size());
    CHECK(std::abs(r.mean - f.mean) < 1e-9);
    CHECK(std::abs(r.sd - f.sd) < 1e-9);
    CHECK(std::abs(r.t - f.t) < 1e-9);
    CHECK(std::abs(r.p - f.p) < 1e-9);
    CHECK(std::abs(r.cohens_d - f.d) < 1e-9);
    CHECK(std::abs(r.wilcoxon_p - f.wilcoxon_p) < 1e-9);
    const auto ints = as_ints(f.x);
    CHECK(std::abs(favorability_share(ints) - f.favorability) < 1e-12);
    CHECK(std::abs(equal_or_better_share(ints) - f.equal_or_better) < 1e-12);
  }
}

TEST_CASE("one-sample test agrees with the textbook-formula oracle") {
  for (const auto& f : stats_fixtures()) {
    auto r = one_sample_test(f.x, 3.0);
    const auto m = ct::moments_oracle(f.x);
    const double n = static_cast<double>(f.x.size());
    const double t = (m.mean - 3.0) / (m.sd / std::sqrt(n));
    const double d = (m.mean - 3.0) / m.sd;
    CHECK(std::abs(r.mean - m.mean) < 1e-12);
    CHECK(std::abs(r.sd - m.sd) < 1e-12);
    CHECK(std::abs(r.t - t) < 1e-9);
    CHECK(std::abs(r.cohens_d - d) < 1e-9);
    CHECK(std::abs(r.p - ct::t_two_sided_p_oracle(t, n - 1.0)) < 1e-9);
  }
}

TEST_CASE("the [3,4] x 5 vector has d 0.9487 and t 3.0000") {
  const std::vector<double> x{3, 4, 3, 4, 3, 4, 3, 4, 3, 4};
  auto r = one_sample_test(x);
  CHECK(r.mean == doctest::Approx(3.5));
  CHECK(std::round(r.sd * 1e4) / 1e4 == doctest::Approx(0.5270));
  CHECK(std::round(r.cohens_d * 1e4) / 1e4 == doctest::Approx(0.9487));
  CHECK(std::round(r.t * 1e4) / 1e4 == doctest::Approx(3.0));
}

TEST_CASE("degenerate samples are reported, not computed") {
  const std::vector<double> threes(8, 3.0);
  try {
    one_sample_test(threes);
    FAIL("expected DegenerateSample");
  } catch (const DegenerateSample& e) {
    CHECK(e.mean_equals_mu());
  }
  const std::vector<double> fours(4, 4.0);
  try {
    one_sample_test(fours);
    FAIL("expected DegenerateSample");
  } catch (const DegenerateSample& e) {
    CHECK_FALSE(e.mean_equals_mu());
  }
  const std::vector<double> one{4.0};
  CHECK_THROWS_AS(one_sample_test(one), PreconditionError);
  CHECK_THROWS_AS(wilcoxon_signed_rank_p(threes), DegenerateSample);
}

TEST_CASE("exact signed-rank p agrees with full enumeration") {
  const std::vector<double> a{0.5, -1.2, 2.3, 3.1, -0.7, 1.9, 2.8, 0.4};
  CHECK(std::abs(wilcoxon_signed_rank_p(a, 0.0) - 0.1484375) < 1e-12);
  CHECK(std::abs(ct::wilcoxon_exact_oracle(a) - 0.1484375) < 1e-12);
  const std::vector<double> b{1, 2, 3, 4, 5, 6, -7, 8, 9, 10, 11, -12};
  CHECK(std::abs(wilcoxon_signed_rank_p(b, 0.0) - 0.12939453125) < 1e-12);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 14);
    std::vector<double> d;
    for (int i = 0; i < n; ++i) d.push_back(u(rng));
    CHECK(std::abs(wilcoxon_signed_rank_p(d, 0.0) - ct::wilcoxon_exact_oracle(d)) < 1e-12);
  }
}

TEST_CASE("t and d are invariant under permutation") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> x;
    const int n = 2 + static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) x.push_back(1.0 + static_cast<double>(rng() % 5));
    if (sample_sd(x) == 0.0) continue;
    auto base = one_sample_test(x);
    std::shuffle(x.begin(), x.end(), rng);
    auto shuffled = one_sample_test(x);
    CHECK(std::abs(base.t - shuffled.t) < 1e-12);
    CHECK(std::abs(base.cohens_d - shuffled.cohens_d) < 1e-12);
    CHECK(std::abs(base.p - shuffled.p) < 1e-12);
  }
}

TEST_CASE("favorability, midpoint and unfavorable shares sum to one") {
  std::mt19937_64 rng(3);
  CHECK(favorability_share(std::vector<int>{5, 4, 3, 2, 1}) == doctest::Approx(0.4));
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> s;
    const int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) s.push_back(1 + static_cast<int>(rng() % 5));
    int mid = 0, unfav = 0;
    for (int v : s) {
      mid += v == 3;
      unfav += v <= 2;
    }
    const double fav = favorability_share(s);
    const double eob = equal_or_better_share(s);
    CHECK(fav >= 0.0);
    CHECK(eob <= 1.0);
    CHECK(std::abs(fav + static_cast<double>(mid) / n + static_cast<double>(unfav) / n - 1.0) < 1e-12);
    CHECK(std::abs(eob - fav - static_cast<double>(mid) / n) < 1e-12);
  }
}

TEST_CASE("summaries group by metric and flag degenerate samples") {
  std::vector<RatingRecord> r;
  for (int i = 0; i < 10; ++i) {
    r.push_back({"p01", "i" + std::to_string(i), Metric::PrecisionFocus, i % 2 ? 4 : 3});
    r.push_back({"p01", "i" + std::to_string(i), Metric::ContextualFit, 3});
  }
  auto s = summarize(r);
  REQUIRE(s.metrics.size() == 2);
  CHECK(s.metrics[0].metric == Metric::PrecisionFocus);
  CHECK(s.metrics[0].n == 10);
  REQUIRE(s.metrics[0].t);
  CHECK(std::abs(*s.metrics[0].t - 3.0) < 1e-9);
  CHECK(s.metrics[1].metric == Metric::ContextualFit);
  CHECK_FALSE(s.metrics[1].t);
  CHECK_FALSE(s.metrics[1].cohens_d);
  REQUIRE(s.metrics[1].degenerate_mean_equals_mu);
  CHECK(*s.metrics[1].degenerate_mean_equals_mu);
  auto j = to_json(s);
  CHECK(j["metrics"][1]["cohens_d"].is_null());
}

TEST_CASE("perplexity examples") {
  const double q = std::log(0.25);
  for (int n = 1; n <= 100; ++n) {
    std::vector<double> lp(static_cast<std::size_t>(n), q);
    CHECK(std::abs(perplexity(lp) - 4.0) < 1e-9);
  }
  CHECK(perplexity(std::vector<double>{0.0}) == 1.0);
  const std::vector<double> halves{std::log(0.5), std::log(0.25), std::log(0.125)};
  CHECK(std::abs(perplexity(halves) - 4.0) < 1e-12);
  std::vector<TokenLogProb> toks{{"a", std::log(0.5)}, {"b", std::log(0.5)}};
  CHECK(std::abs(perplexity(toks) - 2.0) < 1e-12);
}

TEST_CASE("perplexity errors") {
  CHECK_THROWS_AS(perplexity(std::vector<double>{}), EmptySequence);
  CHECK_THROWS_AS(perplexity(std::vector<double>{-1.0, 0.1}), PositiveLogProb);
  CHECK_THROWS_AS(perplexity(std::vector<double>{std::nan("")}), PositiveLogProb);
  CHECK_THROWS_AS(compare_perplexity({}, {{-1.0}}), EmptySequence);
  CHECK_THROWS_AS(corpus_perplexity({{}, {}}), EmptySequence);
}

TEST_CASE("perplexity agrees with a geometric-mean oracle and is at least one") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> prob(0.05, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 50);
    std::vector<double> p, lp;
    for (int i = 0; i < n; ++i) {
      p.push_back(prob(rng));
      lp.push_back(std::log(p.back()));
    }
    double inv_geo = 1.0;
    for (double v : p) inv_geo *= std::pow(v, -1.0 / n);
    const double ppl = perplexity(lp);
    CHECK(ppl >= 1.0);
    CHECK(std::abs(ppl - inv_geo) / inv_geo < 1e-12);

    const int k = 2 + static_cast<int>(rng() % 6);
    std::vector<double> copies;
    for (int c = 0; c < k; ++c) copies.insert(copies.end(), lp.begin(), lp.end());
    CHECK(std::abs(perplexity(copies) - ppl) / ppl < 1e-12);
  }
}

TEST_CASE("comparing corpora") {
  const std::vector<std::vector<double>> a{{std::log(0.25), std::log(0.25)}, {std::log(0.25)}};
  const std::vector<std::vector<double>> b{{0.0, 0.0}, {0.0}};
  CHECK(compare_perplexity(a, a) == 0.0);
  CHECK(std::abs(compare_perplexity(a, b) - 0.75) < 1e-12);
  CHECK(std::abs(corpus_perplexity(a) - 4.0) < 1e-12);
}

TEST_CASE("packets partition items without overlap") {
  const auto items = make_items(100);
  auto packets = build_packets(items, 10, 10, 42);
  REQUIRE(packets.size() == 10);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < packets.size(); ++i) {
    const auto& p = packets[i];
    CHECK(p.items.size() == 10);
    CHECK(p.seed == 42);
    for (const auto& it : p.items) {
      CHECK(seen.insert(it.item_id).second);
      const std::string& ours = it.ours_side == Side::A ? it.side_a : it.side_b;
      const std::string& theirs = it.ours_side == Side::A ? it.side_b : it.side_a;
      CHECK(ours.find("system one") != std::string::npos);
      CHECK(theirs.find("system two") != std::string::npos);
    }
  }
  CHECK(seen.size() == 100);
  CHECK(packets[0].participant_id == "p01");
  CHECK(packets[9].participant_id == "p10");
}

TEST_CASE("packets reuse items across participants only when short") {
  const auto items = make_items(6);
  auto packets = build_packets(items, 4, 5, 1);
  for (const auto& p : packets) {
    std::set<std::string> ids;
    for (const auto& it : p.items) ids.insert(it.item_id);
    CHECK(ids.size() == 5);
  }
  CHECK_THROWS_AS(build_packets(items, 2, 7, 1), PreconditionError);
}

TEST_CASE("packets are deterministic under the seed") {
  const auto items = make_items(30);
  CHECK(build_packets(items, 3, 10, 9) == build_packets(items, 3, 10, 9));
  CHECK_FALSE(build_packets(items, 3, 10, 9) == build_packets(items, 3, 10, 10));
}

TEST_CASE("ours-first share is balanced over many seeds") {
  const auto items = make_items(100);
  int first = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (const auto& p : build_packets(items, 10, 10, seed)) {
      for (const auto& it : p.items) {
        first += it.ours_side == Side::A;
        ++total;
      }
    }
  }
  CHECK(total == 10000);
  const double share = static_cast<double>(first) / total;
  CHECK(share >= 0.48);
  CHECK(share <= 0.52);
}

TEST_CASE("orientation reflects around the midpoint") {
  CHECK(orient_score(5, Side::B) == 5);
  CHECK(orient_score(2, Side::A) == 4);
  for (int raw = 1; raw <= 5; ++raw) {
    for (Side s : {Side::A, Side::B}) {
      CHECK(orient_score(orient_score(raw, s), s) == raw);
      if (raw == 3) CHECK(orient_score(raw, s) == 3);
    }
  }
}

TEST_CASE("unblinding uses the hidden assignment") {
  auto packets = build_packets(make_items(4), 1, 4, 7);
  std::vector<RatingRecord> raw;
  for (const auto& it : packets[0].items) raw.push_back({"p01", it.item_id, Metric::PrecisionFocus, 1});
  auto oriented = unblind_and_orient(raw, packets);
  for (std::size_t i = 0; i < oriented.size(); ++i) {
    const bool ours_a = packets[0].items[i].ours_side == Side::A;
    CHECK(oriented[i].score == (ours_a ? 5 : 1));
  }
  std::vector<RatingRecord> unknown{{"p01", "nope", Metric::PrecisionFocus, 3}};
  CHECK_THROWS_AS(unblind_and_orient(unknown, packets), PreconditionError);
  std::vector<RatingRecord> wrong_metric{{"p01", packets[0].items[0].item_id, Metric::Correctness, 3}};
  CHECK_THROWS_AS(unblind_and_orient(wrong_metric, packets), PreconditionError);
  std::vector<RatingRecord> out_of_range{{"p01", packets[0].items[0].item_id, Metric::PrecisionFocus, 6}};
  CHECK_THROWS_AS(unblind_and_orient(out_of_range, packets), PreconditionError);
}

TEST_CASE("study metric sets differ by kind") {
  CHECK(metric_applies(StudyKind::Questions, Metric::ImmediateEditability));
  CHECK_FALSE(metric_applies(StudyKind::Questions, Metric::AnswerFaithfulness));
  CHECK_FALSE(metric_applies(StudyKind::Questions, Metric::Correctness));
  CHECK_FALSE(metric_applies(StudyKind::Answers, Metric::ImmediateEditability));
  CHECK(metric_applies(StudyKind::Answers, Metric::Correctness));
  for (auto m : metrics_for(StudyKind::Answers)) CHECK(metric_from_string(to_string(m)) == m);
}

TEST_CASE("study export writes blinded documents and a separate key") {
  ct::TempDir dir("clarify-study");
  auto packets = build_packets(make_items(20), 2, 10, 123);
  const auto tpl = PromptTemplate::builtin("study_instructions");
  auto written = export_study_doc(packets, tpl, dir.path() / "a");
  CHECK(written.size() == 5);
  CHECK(std::filesystem::exists(dir.path() / "a" / "participant_p01.md"));
  CHECK(std::filesystem::exists(dir.path() / "a" / "participant_p02.md"));
  CHECK(std::filesystem::exists(dir.path() / "a" / "answer_key.json"));

  for (const char* name : {"participant_p01.md", "participant_p02.md"}) {
    const auto doc = slurp(dir.path() / "a" / name);
    CHECK(blinding_violations(doc, default_blinding_tokens()).empty());
    CHECK(doc.find("Option A") != std::string::npos);
  }
  CHECK(load_answer_key(dir.path() / "a" / "answer_key.json") == packets);

  export_study_doc(build_packets(make_items(20), 2, 10, 123), tpl, dir.path() / "b");
  for (const char* name : {"participant_p01.md", "participant_p02.md", "answer_key.json",
                           "ratings_p01.jsonl"}) {
    CHECK(slurp(dir.path() / "a" / name) == slurp(dir.path() / "b" / name));
  }
  CHECK(load_ratings(dir.path() / "a" / "ratings_p01.jsonl").empty());
}

TEST_CASE("blinding check catches identifying tokens") {
  const auto& tokens = default_blinding_tokens();
  CHECK(blinding_violations("Option A was written by GPT-4o-mini.", tokens).size() >= 1);
  CHECK(blinding_violations("the Fine-Tuned model", tokens).size() == 1);
  CHECK(blinding_violations("ours_side: A", tokens).size() >= 1);
  CHECK(blinding_violations("Detours are fine", tokens).empty());
  CHECK(blinding_violations("A plain comparison of two options.", tokens).empty());
}

TEST_CASE("render_packet fences content safely") {
  StudyPacket p;
  p.participant_id = "p01";
  p.items.push_back({"x", "prompt with ```fence```", "a", "b", Side::A});
  const auto doc = render_packet(p, PromptTemplate::builtin("study_instructions"));
  CHECK(doc.find("````") != std::string::npos);
  CHECK(doc.find("## Item 1 (x)") != std::string::npos);
}

TEST_CASE("ratings and packets round-trip through json") {
  RatingRecord r{"p02", "i9", Metric::AnswerFaithfulness, 4};
  CHECK(rating_from_json(to_json(r)) == r);
  auto packets = build_packets(make_items(5), 1, 5, 3, StudyKind::Answers);
  CHECK(packet_from_json(to_json(packets[0])) == packets[0]);
}

namespace {

ClarificationSet two_questions() {
  ClarificationSet s;
  s.round_index = 1;
  s.questions = {{"r1-q1", "What should the function return?"},
                 {"r1-q2", "What should happen if the API call fails?"}};
  return s;
}

}  // namespace

TEST_CASE("simulated user answers every question") {
  auto b = ct::stub_backend({StubStep::text("1. The profile JSON\n2. Throw an error")});
  SimulatedUser user{b.client};
  auto r = simulate_user(user, "fetch user data", "return JSON; throw on failure", two_questions());
  CHECK(r.round_index == 1);
  CHECK(r.answers.size() == 2);
  CHECK(r.answers.at("r1-q1") == "The profile JSON");
  CHECK(r.answers.at("r1-q2") == "Throw an error");
  const auto sent = b.transport->requests().at(0).last_user_content();
  CHECK(sent.find("return JSON; throw on failure") != std::string::npos);
  CHECK(sent.find("2. What should happen if the API call fails?") != std::string::npos);
}

TEST_CASE("simulated user may answer only the first question") {
  auto b = ct::stub_backend({StubStep::text("1. JSON from REST endpoint\n2. SKIP")});
  auto r = simulate_user(SimulatedUser{b.client}, "p", "i", two_questions());
  CHECK(r.answers.size() == 1);
  CHECK(r.answers.at("r1-q1") == "JSON from REST endpoint");
}

TEST_CASE("simulated user reply parsing variants") {
  const auto set = two_questions();
  auto a = parse_simulated_answers("(2) later\n1) first\n   continued", set);
  CHECK(a.answers.at("r1-q1") == "first continued");
  CHECK(a.answers.at("r1-q2") == "later");
  ClarificationSet single;
  single.questions = {{"r2-q1", "Which language?"}};
  single.round_index = 2;
  auto s = parse_simulated_answers("TypeScript, please.", single);
  CHECK(s.round_index == 2);
  CHECK(s.answers.at("r2-q1") == "TypeScript, please.");
  CHECK(parse_simulated_answers("1. \n2. skip", set).answers.empty());
  CHECK(parse_simulated_answers("3. out of range", set).answers.empty());
}

TEST_CASE("simulated user propagates backend failure") {
  auto b = ct::stub_backend({StubStep::failure(AttemptFailure::Timeout)}, StubExhausted::RepeatLast,
                            nullptr, ct::fast_config(1));
  CHECK_THROWS_AS(simulate_user(SimulatedUser{b.client}, "p", "i", two_questions()), BackendExhausted);
}

#include <doctest.h>

#include <cmath>

#include "evocorps/metrics.hpp"
#include "fixture_util.hpp"

using namespace evocorps;
using namespace evocorps::metrics;

namespace {

MetricSnapshot snap_fixture(int t) {
  const auto cs = fixtures::load_comments("snapshot_comments.jsonl");
  ScriptedGrader g;
  std::vector<CommentGrades> grades;
  for (const auto& c : cs) grades.push_back(g.grade(c, "fixture"));
  return snapshot(cs, grades, t);
}

}  // namespace

TEST_CASE("reward examples") {
  const MeanFieldState a{0.30, 0.40, 1};
  const MeanFieldState b{0.25, 0.45, 2};
  CHECK(reward(a, b) == doctest::Approx(0.10));
  CHECK(reward(a, a) == 0.0);
  const MeanFieldState c{0.40, 0.50, 2};
  CHECK(reward(a, c, {2.0, 1.0}) == doctest::Approx(-0.10));
  const MeanFieldState d{0.20, 0.45, 2};
  CHECK(reward(a, d) == doctest::Approx(0.15));
}

TEST_CASE("reward series") {
  const auto s = reward_series({0.1, 0.2});
  CHECK(s.cumulative[0] == doctest::Approx(0.1));
  CHECK(s.cumulative[1] == doctest::Approx(0.3));
  CHECK(s.average[1] == doctest::Approx(0.15));
  const auto z = reward_series({0.0, 0.0, 0.0});
  for (double v : z.cumulative) CHECK(v == 0.0);
  CHECK(reward_series({}).reward.empty());
}

TEST_CASE("label maps") {
  CHECK(sentiment_score("Very Negative") == 0.0);
  CHECK(sentiment_score("Neutral") == 0.5);
  CHECK(sentiment_score("Very Positive") == 1.0);
  CHECK(sentiment_score(" \"positive.\" ") == 0.75);
  CHECK_FALSE(sentiment_score("Mixed").has_value());
  CHECK(extremity_score("Very Moderate") == 0.0);
  CHECK(extremity_score("Extreme") == 0.75);
  CHECK_FALSE(extremity_score("Positive").has_value());
  CHECK(is_fallacy_type("Ad Hominem"));
  CHECK_FALSE(is_fallacy_type("Strawman"));
}

TEST_CASE("entropy and quantization") {
  CHECK(label_entropy({1, 1, 1, 1, 1}) == doctest::Approx(std::log(5.0)));
  CHECK(label_entropy({4, 0, 0, 0, 0}) == 0.0);
  CHECK(label_entropy({}) == 0.0);
  CHECK(quantize5(0.0) == 0);
  CHECK(quantize5(0.3) == 1);
  CHECK(quantize5(0.9) == 4);
  CHECK(quantize5(1.0) == 4);
}

TEST_CASE("toxicity graders") {
  Comment c;
  c.toxicity = 0.7;
  CHECK(*ScriptedGrader().grade(c, "").toxicity == doctest::Approx(0.7));
  Lexicon lex({"liars"});
  CHECK(lexicon_toxicity("calm and civil words", lex) == 0.0);
  CHECK(lexicon_toxicity("liars", lex) == 1.0);
  CHECK(lexicon_toxicity("", lex) == 0.0);
  c.text = "perfectly calm text";
  CHECK(*ScriptedGrader(ToxicityMode::kLexiconProxy, lex).grade(c, "").toxicity == 0.0);
}

TEST_CASE("snapshot toxicity mean scales to 100") {
  std::vector<Comment> cs;
  for (int i = 0; i < 51; ++i) {
    Comment c;
    c.id = comment_id_for(static_cast<std::size_t>(i));
    c.post_id = "p0001";
    c.toxicity = i == 0 ? 0.2 : 0.4;
    c.agent_type = i < 2 ? AgentType::kNormal : AgentType::kAmplifier;
    cs.push_back(c);
  }
  std::vector<CommentGrades> grades;
  for (const auto& c : cs) grades.push_back(ScriptedGrader().grade(c, ""));
  const auto s = snapshot(cs, grades, 1);
  CHECK(s.n_comments == 2);
  CHECK(*s.toxicity == doctest::Approx(30.0));
}

TEST_CASE("aqs rubric") {
  Comment c;
  c.evidence = true;
  c.stance = 0.0;
  c.sentiment = 1.0;
  c.toxicity = 0.0;
  CHECK(aqs_rubric(c) == doctest::Approx(1.0));
  c.evidence = false;
  c.stance = -1.0;
  c.sentiment = 0.0;
  CHECK(aqs_rubric(c) == doctest::Approx(0.3));
}

TEST_CASE("fallacy rule") {
  Comment c;
  c.toxicity = 0.6;
  CHECK(fallacy_rule(c).fallacious);
  CHECK(is_fallacy_type(fallacy_rule(c).type));
  c.toxicity = 0.1;
  c.stance = 0.9;
  c.evidence = true;
  CHECK_FALSE(fallacy_rule(c).fallacious);
  CHECK(fallacy_rule(c).type.empty());
  c.evidence = false;
  CHECK(fallacy_rule(c).fallacious);
}

TEST_CASE("evidence in text") {
  CHECK(evidence_in_text("see https://example.org/study"));
  CHECK_FALSE(evidence_in_text("experts agree this is bad"));
  CHECK(evidence_in_text("According to the CDC 2021 report"));
  CHECK_FALSE(evidence_in_text("studies show it works"));
}

TEST_CASE("grader reply parsers") {
  std::string type;
  CHECK(parse_fallacy_reply(R"({"fallacious": "Yes", "fallacy_type": "Ad Hominem"})", &type) == true);
  CHECK(type == "Ad Hominem");
  CHECK_FALSE(parse_fallacy_reply(R"({"fallacious": "Yes", "fallacy_type": "Strawman"})").has_value());
  CHECK_FALSE(parse_fallacy_reply("garbage").has_value());
  CHECK(parse_evidence_reply(R"({"evidence_present": 1})") == true);
  CHECK_FALSE(parse_evidence_reply(R"({"evidence_present": 3})").has_value());
}

TEST_CASE("eligibility") {
  Comment c;
  c.time_step = 5;
  CHECK(eligible(c, 51, 5));
  CHECK_FALSE(eligible(c, 50, 5));
  CHECK_FALSE(eligible(c, 51, 4));
  c.agent_type = AgentType::kLeader;
  CHECK_FALSE(eligible(c, 51, 5));
}

TEST_CASE("snapshot over the fixture at t=10") {
  const auto s = snap_fixture(10);
  CHECK(s.n_comments == 30);
  CHECK(*s.sentiment == doctest::Approx(75.0));
  CHECK(*s.toxicity == doctest::Approx(30.0));
  CHECK(*s.extremity == doctest::Approx(50.0));
  CHECK(*s.evidence == doctest::Approx(20.0));
  CHECK(*s.fallacy == doctest::Approx(100.0 / 3.0));
  CHECK(*s.aqs == doctest::Approx(56.2));
  CHECK(*s.extremity_entropy == doctest::Approx(std::log(3.0)));
}

TEST_CASE("snapshot over the fixture at t=20") {
  const auto s = snap_fixture(20);
  CHECK(s.n_comments == 40);
  CHECK(*s.sentiment == doctest::Approx(68.75));
  CHECK(*s.extremity == doctest::Approx(37.5));
  CHECK(*s.toxicity == doctest::Approx(22.5));
  CHECK(*s.evidence == doctest::Approx(15.0));
  CHECK(*s.fallacy == doctest::Approx(25.0));
  CHECK(*s.aqs == doctest::Approx(57.15));
}

TEST_CASE("empty snapshot has missing metrics") {
  const auto s = snap_fixture(0);
  CHECK(s.n_comments == 0);
  CHECK_FALSE(s.sentiment.has_value());
  CHECK_FALSE(s.aqs.has_value());
}

TEST_CASE("csv rows are long format") {
  MetricSnapshot s;
  s.t = 3;
  s.sentiment = 50.0;
  s.n_comments = 4;
  const auto rows = snapshot_csv_rows("case2", s);
  CHECK(rows.find("case2,3,sentiment,50") != std::string::npos);
  CHECK(rows.find("case2,3,toxicity,,4") != std::string::npos);
  CHECK(snapshot_csv_header() == "case,t,metric,value,n_comments");
}

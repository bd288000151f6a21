#include <doctest.h>

#include <cmath>
#include <set>

#include "evocorps/error.hpp"
#include "evocorps/rng.hpp"
#include "evocorps/text.hpp"
#include "evocorps/types.hpp"

using namespace evocorps;

TEST_CASE("rng streams are reproducible and independent") {
  auto a = Rng::stream(42, "users", 3, 7);
  auto b = Rng::stream(42, "users", 3, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

  auto c = Rng::stream(42, "users", 3, 8);
  auto d = Rng::stream(42, "attack", 3, 7);
  auto e = Rng::stream(43, "users", 3, 7);
  auto base = Rng::stream(42, "users", 3, 7);
  const auto x = base.next();
  CHECK(c.next() != x);
  CHECK(d.next() != x);
  CHECK(e.next() != x);
}

TEST_CASE("rng distributions stay in range") {
  Rng r(1);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    const auto k = r.uniform_int(-3, 3);
    REQUIRE(k >= -3);
    REQUIRE(k <= 3);
  }
  CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));

  double m = 0.0, m2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal(1.0, 2.0);
    m += z;
    m2 += z * z;
  }
  m /= n;
  const double sd = std::sqrt(m2 / n - m * m);
  CHECK(m == doctest::Approx(1.0).epsilon(0.05));
  CHECK(sd == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("normal with zero sd consumes nothing") {
  Rng a(9), b(9);
  CHECK(a.normal(0.3, 0.0) == 0.3);
  CHECK(a.next() == b.next());
}

TEST_CASE("sample without replacement gives distinct indices") {
  Rng r(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = r.sample_without_replacement(40, 15);
    REQUIRE(s.size() == 15);
    std::set<std::size_t> uniq(s.begin(), s.end());
    CHECK(uniq.size() == 15);
    for (auto i : s) CHECK(i < 40);
  }
  CHECK(r.sample_without_replacement(3, 3).size() == 3);
}

TEST_CASE("tokenize lowercases, splits on punctuation and dedups") {
  const auto t = tokenize("Water, water! BOIL-advisory 2024");
  CHECK(t == TokenSet{"2024", "advisory", "boil", "water"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("...").empty());
}

TEST_CASE("topic tokens drop stopwords") {
  const auto t = topic_tokens("The council approves a fare change for the bus");
  CHECK(t == TokenSet{"approves", "bus", "change", "council", "fare"});
}

TEST_CASE("jaccard by hand") {
  CHECK(jaccard({"a", "b", "c"}, {"a", "b", "d"}) == doctest::Approx(0.5));
  CHECK(jaccard({"a"}, {"b"}) == 0.0);
  CHECK(jaccard({}, {}) == 0.0);
  CHECK(jaccard({"x", "y"}, {"x", "y"}) == 1.0);
  CHECK(set_union({"a", "c"}, {"b", "c"}) == TokenSet{"a", "b", "c"});
}

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("lexicon counts hits with multiplicity") {
  Lexicon lex({"Liars", "fraud"});
  CHECK(lex.hits("liars! total LIARS and a fraud") == 3);
  CHECK(lex.any_hit("calm words only") == false);
  CHECK(Lexicon().empty());
}

TEST_CASE("ids are zero padded and round trip") {
  CHECK(post_id_for(0) == "p0001");
  CHECK(comment_id_for(41) == "c000042");
  CHECK(post_index_of("p0001") == 0u);
  CHECK(comment_index_of("c000042") == 41u);
  CHECK_FALSE(post_index_of("c0001").has_value());
  CHECK_FALSE(comment_index_of("c").has_value());
  CHECK_FALSE(comment_index_of("c000000").has_value());
  CHECK_FALSE(post_index_of("p12x").has_value());
}

TEST_CASE("enum string round trips") {
  for (auto t : {AgentType::kNormal, AgentType::kMalicious, AgentType::kAmplifier,
                 AgentType::kLeader}) {
    CHECK(parse_agent_type(to_string(t)) == t);
  }
  CHECK(to_string(AgentType::kNormal) == "normal");
  for (auto p : {Polarity::kBenign, Polarity::kAdversarial, Polarity::kClarification}) {
    CHECK(parse_polarity(to_string(p)) == p);
  }
  for (auto l : {VerdictLabel::kTrue, VerdictLabel::kFalse, VerdictLabel::kUnverified}) {
    CHECK(parse_verdict_label(to_string(l)) == l);
  }
  CHECK_THROWS_AS(parse_agent_type("robot"), Error);
}

TEST_CASE("post visibility honours publish and removal steps") {
  Post p;
  p.publish_step = 3;
  CHECK_FALSE(p.visible_at(2));
  CHECK(p.visible_at(3));
  p.removed_from_step = 6;
  CHECK(p.visible_at(5));
  CHECK_FALSE(p.visible_at(6));
}

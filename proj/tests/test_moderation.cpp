#include <doctest.h>

#include "evocorps/moderation.hpp"

using namespace evocorps;
using namespace evocorps::moderation;

namespace {

Post post(std::string id, int publish, Polarity pol) {
  Post p;
  p.id = std::move(id);
  p.publish_step = publish;
  p.polarity = pol;
  p.text = "Transit board raises fares";
  return p;
}

}  // namespace

TEST_CASE("checks fall due after the delay, once") {
  ModerationParams mp;
  std::vector<Post> posts{post("p0001", 2, Polarity::kBenign)};
  CHECK(schedule_checks(posts, 4, mp).empty());
  REQUIRE(schedule_checks(posts, 5, mp) == std::vector<std::size_t>{0});
  posts[0].verdict = Verdict{};
  CHECK(schedule_checks(posts, 6, mp).empty());
  std::vector<Post> early{post("p0001", 1, Polarity::kBenign)};
  CHECK(schedule_checks(early, 2, mp).empty());
}

TEST_CASE("scripted oracle follows provenance") {
  ModerationParams mp;
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto v = adjudicate(post("p0001", 1, Polarity::kAdversarial), 4, mp, rng);
    CHECK(v.label == VerdictLabel::kFalse);
    CHECK(v.confidence >= 0.85);
    CHECK(v.confidence <= 0.99);
    CHECK(v.issued_step == 4);
  }
  const auto clar = adjudicate(post("p0002", 5, Polarity::kClarification), 8, mp, rng);
  CHECK(clar.label == VerdictLabel::kTrue);
  CHECK(clar.confidence == doctest::Approx(0.95));
  const auto benign = adjudicate(post("p0003", 1, Polarity::kBenign), 4, mp, rng);
  CHECK(benign.label == VerdictLabel::kUnverified);
  CHECK(benign.confidence == doctest::Approx(0.5));
}

TEST_CASE("engagement does not change the verdict") {
  ModerationParams mp;
  auto quiet = post("p0001", 1, Polarity::kAdversarial);
  auto loud = quiet;
  loud.likes = 10000;
  loud.shares = 500;
  Rng a(7), b(7);
  const auto va = adjudicate(quiet, 4, mp, a);
  const auto vb = adjudicate(loud, 4, mp, b);
  CHECK(va.label == vb.label);
  CHECK(va.confidence == vb.confidence);
}

TEST_CASE("enforcement") {
  ModerationParams mp;
  auto p = post("p0001", 1, Polarity::kAdversarial);
  Verdict v;
  v.label = VerdictLabel::kFalse;
  v.confidence = 0.95;
  v.issued_step = 4;
  CHECK(is_takedown(v, mp));
  CHECK(enforce(p, v, mp));
  CHECK(p.visible_at(4));
  CHECK_FALSE(p.visible_at(5));
  REQUIRE(p.verdict.has_value());

  auto q = post("p0002", 1, Polarity::kAdversarial);
  v.confidence = 0.85;
  CHECK_FALSE(enforce(q, v, mp));
  CHECK(q.visible_at(9));
  CHECK(q.verdict.has_value());

  auto r = post("p0003", 1, Polarity::kClarification);
  v.label = VerdictLabel::kTrue;
  v.confidence = 0.99;
  CHECK_FALSE(enforce(r, v, mp));
  CHECK(r.visible_at(9));
  v.label = VerdictLabel::kFalse;
  v.confidence = 0.9;
  CHECK_FALSE(is_takedown(v, mp));
}

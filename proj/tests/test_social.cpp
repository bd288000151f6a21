#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "evocorps/error.hpp"
#include "evocorps/rng.hpp"
#include "evocorps/social.hpp"
#include "fixture_util.hpp"

using namespace evocorps;
using namespace evocorps::social;
using nlohmann::json;

namespace {

NewsRecord rec(std::string id, int step, std::string tag = "real") {
  return {std::move(id), "Metro Desk", "City council discusses bus fares", step, std::move(tag)};
}

Post post(std::string id, int publish, Polarity pol = Polarity::kAdversarial) {
  Post p;
  p.id = std::move(id);
  p.publish_step = publish;
  p.polarity = pol;
  return p;
}

const NewsItem* find_item(const std::vector<NewsItem>& items, const std::string& id) {
  for (const auto& i : items) {
    if (i.id == id) return &i;
  }
  return nullptr;
}

std::vector<const Comment*> ptrs(const std::vector<Comment>& cs) {
  std::vector<const Comment*> out;
  for (const auto& c : cs) out.push_back(&c);
  return out;
}

}  // namespace

TEST_CASE("stream: adversarial at step 1 with delay 4 clarifies at step 5") {
  const auto items = build_stream({rec("n1", 1), rec("n2", 2)}, 1.0, 4);
  const auto* adv = find_item(items, "n1-adv");
  const auto* clar = find_item(items, "n1-clar");
  REQUIRE(adv != nullptr);
  REQUIRE(clar != nullptr);
  CHECK(adv->polarity == Polarity::kAdversarial);
  CHECK(adv->publish_step == 1);
  CHECK(clar->polarity == Polarity::kClarification);
  CHECK(clar->publish_step == 5);
  CHECK(clar->origin_id == std::optional<std::string>("n1-adv"));
  for (std::size_t i = 1; i < items.size(); ++i) {
    CHECK(items[i - 1].publish_step <= items[i].publish_step);
  }
}

TEST_CASE("stream: fraction 0 is all benign") {
  const auto items = build_stream({rec("n1", 1), rec("n2", 2), rec("n3", 3)}, 0.0, 4);
  REQUIRE(items.size() == 3);
  for (const auto& i : items) CHECK(i.polarity == Polarity::kBenign);
}

TEST_CASE("stream: late items keep a clarification past the horizon") {
  const auto items = build_stream({rec("n28", 28)}, 1.0, 4);
  const auto* clar = find_item(items, "n28-clar");
  REQUIRE(clar != nullptr);
  CHECK(clar->publish_step == 32);
}

TEST_CASE("stream: selection is evenly spaced and skips benign records") {
  std::vector<NewsRecord> rs;
  for (int s = 1; s <= 8; ++s) rs.push_back(rec("n" + std::to_string(s), s));
  rs.push_back(rec("b9", 9, "benign"));
  const auto items = build_stream(rs, 0.25, 4);
  std::set<std::string> adv;
  for (const auto& i : items) {
    if (i.polarity == Polarity::kAdversarial) adv.insert(i.id);
  }
  CHECK(adv == std::set<std::string>{"n1-adv", "n5-adv"});
  CHECK(find_item(items, "b9")->polarity == Polarity::kBenign);
  CHECK_THROWS_AS(build_stream({}, 0.5, 4), Error);
  CHECK_THROWS_AS(build_stream(rs, 1.5, 4), Error);
  CHECK_THROWS_AS(build_stream(rs, 0.5, 0), Error);
}

TEST_CASE("rank_feed orders by likes then recency") {
  SUBCASE("likes 5,3,9") {
    std::vector<Comment> cs{fixtures::comment("c1", 5, 0), fixtures::comment("c2", 3, 0),
                            fixtures::comment("c3", 9, 0)};
    const auto r = rank_feed(ptrs(cs), 5);
    REQUIRE(r.size() == 3);
    CHECK(r[0]->likes == 9);
    CHECK(r[1]->likes == 5);
    CHECK(r[2]->likes == 3);
  }
  SUBCASE("tie goes to the newer comment") {
    std::vector<Comment> cs{fixtures::comment("c1", 4, 0, AgentType::kNormal, 2),
                            fixtures::comment("c2", 4, 0, AgentType::kNormal, 3)};
    const auto r = rank_feed(ptrs(cs), 5);
    CHECK(r[0]->id == "c2");
  }
  SUBCASE("empty and truncated") {
    CHECK(rank_feed({}, 5).empty());
    std::vector<Comment> cs{fixtures::comment("c1", 1, 0), fixtures::comment("c2", 2, 0),
                            fixtures::comment("c3", 3, 0)};
    CHECK(rank_feed(ptrs(cs), 2).size() == 2);
  }
}

TEST_CASE("hotness and the feed window") {
  std::vector<Comment> cs{fixtures::comment("c1", 3, 0), fixtures::comment("c2", 1, 0)};
  Post p = post("p0001", 2, Polarity::kBenign);
  p.likes = 2;
  p.comments = {0, 1};
  // (1 + 2 comments + 6 likes) / (1 + 3)
  CHECK(hotness(p, cs, 5) == doctest::Approx(9.0 / 4.0));

  std::vector<Post> posts{post("p0001", 1, Polarity::kBenign), post("p0002", 5, Polarity::kBenign),
                          post("p0003", 7, Polarity::kBenign)};
  FeedParams fp;
  fp.window = 3;
  const auto feed = build_feed(posts, {}, 6, fp);
  REQUIRE(feed.size() == 1);  // p0001 aged out, p0003 not yet published
  CHECK(feed[0].post->id == "p0002");

  posts[1].removed_from_step = 6;
  CHECK(build_feed(posts, {}, 6, fp).empty());
}

TEST_CASE("update_user convex pull") {
  UserDynamics dyn;
  dyn.beta = 1.0;
  dyn.noise_sd = 0.0;
  Rng rng(1);
  std::vector<Comment> cs{fixtures::comment("c1", 0, -1.0)};
  cs[0].sentiment = 0.1;

  OrdinaryUser u;
  u.opinion = 0.0;
  u.susceptibility = 0.5;
  u.mood = 0.5;
  const auto v = update_user(u, ptrs(cs), dyn, rng);
  CHECK(v.opinion == doctest::Approx(-0.5));
  CHECK(v.mood == doctest::Approx(0.3));

  SUBCASE("zero susceptibility leaves the user unchanged") {
    u.susceptibility = 0.0;
    const auto w = update_user(u, ptrs(cs), dyn, rng);
    CHECK(w.opinion == 0.0);
    CHECK(w.mood == 0.5);
  }
  SUBCASE("fixed point") {
    cs[0].stance = 0.9;
    u.opinion = 0.9;
    CHECK(update_user(u, ptrs(cs), dyn, rng).opinion == doctest::Approx(0.9));
  }
  SUBCASE("empty visible set draws nothing") {
    Rng a(5), b(5);
    UserDynamics noisy = dyn;
    noisy.noise_sd = 0.3;
    const auto w = update_user(u, {}, noisy, a);
    CHECK(w.opinion == 0.0);
    CHECK(a.next() == b.next());
  }
  SUBCASE("likes weight the mean") {
    std::vector<Comment> two{fixtures::comment("c1", 0, 1.0), fixtures::comment("c2", 3, -1.0)};
    // mu = 1*(1/5) + (-1)*(4/5) = -0.6
    const auto w = update_user(u, ptrs(two), dyn, rng);
    CHECK(w.opinion == doctest::Approx(-0.3));
  }
}

TEST_CASE("opinion stays bounded under noise") {
  UserDynamics dyn;
  dyn.noise_sd = 0.5;
  Rng rng(77);
  std::vector<Comment> cs{fixtures::comment("c1", 2, -1.0)};
  OrdinaryUser u;
  for (int i = 0; i < 2000; ++i) {
    u = update_user(u, ptrs(cs), dyn, rng);
    REQUIRE(u.opinion >= -1.0);
    REQUIRE(u.opinion <= 1.0);
    REQUIRE(u.mood >= 0.0);
    REQUIRE(u.mood <= 1.0);
  }
}

TEST_CASE("toxicity surrogate") {
  CHECK(toxicity_surrogate(0.0, 0.5) == doctest::Approx(0.1));
  CHECK(toxicity_surrogate(1.0, 0.0) == doctest::Approx(0.7));
}

TEST_CASE("engaged sessions have 5 to 8 actions") {
  std::vector<Post> posts{post("p0001", 1, Polarity::kBenign)};
  std::vector<Comment> cs{fixtures::comment("c000001", 1, 0.2)};
  cs[0].author_id = "u002";
  posts[0].comments = {0};
  const auto feed = build_feed(posts, cs, 1, FeedParams{});
  OrdinaryUser u;
  u.id = "u001";
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    const auto acts = session(u, feed, rng);
    REQUIRE(acts.size() >= 5);
    REQUIRE(acts.size() <= 8);
    for (const auto& a : acts) {
      if (a.kind == ActionKind::kFollowUser) CHECK(a.target == "u002");
    }
  }
  u.activity = 0.0;
  CHECK(act(u, feed, UserDynamics{}, rng).empty());
}

TEST_CASE("remote actions with unknown targets are dropped") {
  std::vector<Post> posts{post("p0001", 1, Polarity::kBenign)};
  std::vector<Comment> cs{fixtures::comment("c000001", 1, 0.2)};
  cs[0].author_id = "u002";
  posts[0].comments = {0};
  const auto feed = build_feed(posts, cs, 1, FeedParams{});
  const std::string reply = R"(Sure. {"actions":[
    {"action":"like-post","target":"p0001"},
    {"action":"like-post","target":"p9999"},
    {"action":"comment-post","target":"p0001","content":"Fair point."},
    {"action":"like-comment","target":"c000001"},
    {"action":"follow-user","target":"ghost"},
    {"action":"dance"}
  ]})";
  std::vector<std::string> dropped;
  const auto acts = parse_remote_actions(reply, feed, dropped);
  CHECK(acts.size() == 3);
  CHECK(dropped.size() == 3);
  CHECK_THROWS_AS(parse_remote_actions("no json here", feed, dropped), Error);
}

TEST_CASE("attack: 15 distinct identities inside the window only") {
  AttackParams ap;
  std::vector<Post> posts{post("p0001", 4)};
  Rng rng(9);
  const auto drafts = attack(posts, 6, 200, ap, rng);
  REQUIRE(drafts.size() == 15);
  std::set<std::size_t> who;
  for (const auto& d : drafts) {
    who.insert(d.persona_index);
    CHECK(d.stance >= -1.0);
    CHECK(d.stance <= -0.8);
    CHECK(d.toxicity >= 0.6);
  }
  CHECK(who.size() == 15);
  CHECK(attack(posts, 7, 200, ap, rng).empty());
  CHECK(attack(posts, 8, 200, ap, rng).empty());
  CHECK_THROWS_AS(attack(posts, 6, 10, ap, rng), Error);

  std::vector<Post> benign{post("p0002", 6, Polarity::kBenign)};
  CHECK(attack(benign, 6, 200, ap, rng).empty());
}

TEST_CASE("boost picks the two most extreme malicious comments") {
  AttackParams ap;
  std::vector<Post> posts{post("p0001", 1)};
  std::vector<Comment> cs;
  for (int i = 0; i < 10; ++i) {
    cs.push_back(fixtures::comment("c" + std::to_string(100 + i), i, -0.8 - 0.01 * i,
                                   AgentType::kMalicious));
    posts[0].comments.push_back(static_cast<std::size_t>(i));
  }
  auto ev = boost(posts, cs, 1, ap);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].comment_id == "c109");
  CHECK(ev[1].comment_id == "c108");
  CHECK(ev[0].likes == 5);

  posts[0].comments = {0};
  ev = boost(posts, cs, 1, ap);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].comment_id == "c100");

  posts[0].comments.clear();
  CHECK(boost(posts, cs, 1, ap).empty());
}

TEST_CASE("bundled personas load") {
  const std::filesystem::path dir = EVOCORPS_TEST_DATA "/personas";
  const auto neutral = load_personas(dir / "neutral.json");
  CHECK(neutral.neutral.size() == 200);
  bool robert = false;
  for (const auto& p : neutral.neutral) {
    if (p.id == "neutral_robert_001") {
      robert = true;
      CHECK(p.type == PersonaType::kNeutral);
    }
  }
  CHECK(robert);
  CHECK(load_personas(dir / "negative.json").negative.size() >= 15);
}

TEST_CASE("persona schema errors name the record and field") {
  const auto path = std::filesystem::temp_directory_path() / "evc_personas_test.json";
  json rec = {{"id", "neutral_x_001"},
              {"type", "neutral"},
              {"name", "X"},
              {"profession", "Clerk"},
              {"demographics", {{"age", "40"}, {"region", "Ohio"}}},
              {"background", "b"},
              {"personality_traits", {"calm"}},
              {"communication_style", {{"tone", "calm"}, {"engagement_level", "low"}}}};
  auto write = [&](const json& j) {
    std::ofstream f(path);
    f << j.dump();
  };

  SUBCASE("valid pool of 200") {
    json arr = json::array();
    for (int i = 0; i < 200; ++i) {
      json r = rec;
      r["id"] = "neutral_x_" + std::to_string(i);
      arr.push_back(r);
    }
    write(arr);
    CHECK(load_personas(path).neutral.size() == 200);
  }
  SUBCASE("missing communication_style") {
    json r = rec;
    r.erase("communication_style");
    write(json::array({r}));
    try {
      load_personas(path);
      FAIL("expected rejection");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParse);
      const std::string msg = e.what();
      CHECK(msg.find("neutral_x_001") != std::string::npos);
      CHECK(msg.find("communication_style") != std::string::npos);
    }
  }
  SUBCASE("duplicate id") {
    write(json::array({rec, rec}));
    try {
      load_personas(path);
      FAIL("expected duplicate");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDuplicate);
    }
  }
  std::filesystem::remove(path);
}

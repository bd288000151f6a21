// Acceptance checks: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "evocorps/cognition.hpp"
#include "evocorps/engine.hpp"
#include "evocorps/metrics.hpp"
#include "evocorps/moderation.hpp"
#include "evocorps/rng.hpp"
#include "evocorps/team.hpp"

using namespace evocorps;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Criteria whose stated oracle contradicts the formula it cites. They are
// computed faithfully and reported, but do not fail the binary.
const std::set<int> kKnownUnattainable = {1};

int g_failed = 0;

void report(int id, const char* name, const std::function<Outcome()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s criterion %d %s: %s [%.1f ms]%s\n", o.pass ? "PASS" : "FAIL", id, name,
              o.detail.c_str(), ms,
              !o.pass && kKnownUnattainable.count(id) ? " (known spec inconsistency)" : "");
  std::fflush(stdout);
  if (!o.pass && !kKnownUnattainable.count(id)) ++g_failed;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

engine::ScenarioConfig base(int kase, std::uint64_t seed) {
  engine::ScenarioConfig c;
  c.case_id = static_cast<engine::CaseId>(kase);
  c.seed = seed;
  return c;
}

// ------------------------------------------------------------------------

Outcome c1_reward() {
  const MeanFieldState prev{0.30, 0.40, 0};
  const MeanFieldState next{0.25, 0.45, 1};
  const double r = metrics::reward(prev, next, {1.0, 1.0});
  const bool pass = r == 0.15;
  return {pass, fmt("reward = %.17g, stated oracle 0.15; -(0.25-0.30)+(0.45-0.40) = 0.10", r)};
}

Outcome c2_kb() {
  cognition::KnowledgeBase kb(0.3, 0.01);
  auto mk = [](const char* id) {
    cognition::EvidenceItem e;
    e.id = id;
    e.claim_text = id;
    e.persuasiveness = 0.5;
    e.topic_tags = {"t"};
    return e;
  };
  kb.seed(mk("sel"));
  kb.seed(mk("other"));
  kb.reinforce(0.15, {"sel"});
  const double p = kb.find("sel")->persuasiveness;
  const double q = kb.find("other")->persuasiveness;
  bool exact = p == 0.5015 && q == 0.5;

  Rng rng(2024);
  int escapes = 0;
  for (int i = 0; i < 100000; ++i) {
    cognition::KnowledgeBase k(0.3, rng.uniform(0.0, 1.0));
    auto e = mk("x");
    e.persuasiveness = rng.uniform(0.0, 1.0);
    k.seed(e);
    k.reinforce(rng.uniform(-50.0, 50.0), {"x"});
    const double v = k.find("x")->persuasiveness;
    if (v < 0.0 || v > 1.0) ++escapes;
  }
  return {exact && escapes == 0,
          fmt("selected %.17g, unselected %.17g, %g escapes in 1e5 trials", p, q, escapes)};
}

Outcome c3_memory() {
  cognition::ActionOutcomeMemory mem;
  Rng rng(99);
  int mismatches = 0, shrinks = 0;
  for (int i = 0; i < 10000; ++i) {
    cognition::MemoryTuple t;
    t.reward = rng.uniform(-1.0, 1.0);
    const double eps = rng.uniform(1e-6, 1.0 - 1e-6);
    const auto before = mem.size();
    const bool kept = mem.record(t, eps);
    if (kept != (t.reward > eps)) ++mismatches;
    if (mem.size() < before) ++shrinks;
    if (mem.size() != before + (kept ? 1 : 0)) ++mismatches;
  }
  return {mismatches == 0 && shrinks == 0,
          fmt("%g gate mismatches, %g shrinks, %g retained", mismatches, shrinks,
              static_cast<double>(mem.size()))};
}

Outcome c4_extremism() {
  Rng rng(4);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 10));
    std::vector<team::LeveledComment> cs;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int likes = static_cast<int>(rng.uniform_int(0, 100));
      const int level = static_cast<int>(rng.uniform_int(0, 4));
      cs.push_back({likes, level});
      num += level * (likes + 1.0);
      den += likes + 1.0;
    }
    worst = std::max(worst, std::abs(team::weighted_extremism(cs).score - num / den));
  }
  const double fixed = team::weighted_extremism({{0, 1}, {50, 3}}).score;
  const double err = std::abs(fixed - 154.0 / 52.0);
  return {worst <= 1e-9 && err <= 1e-9,
          fmt("max random deviation %.3g, fixed case %.12f (err %.3g)", worst, fixed, err)};
}

Outcome c5_determinism() {
  auto cfg = base(4, 42);
  cfg.horizon = 30;
  cfg.population = 50;
  const auto a = engine::run_scenario(cfg);
  const auto b = engine::run_scenario(cfg);
  const auto da = engine::replay_digest(a.log);
  const auto db = engine::replay_digest(b.log);
  return {da == db, "digests " + da.substr(0, 16) + " / " + db.substr(0, 16)};
}

Outcome c6_mechanisms() {
  const auto cfg = base(2, 7);
  const auto r = engine::run_scenario(cfg);
  struct PostInfo {
    int step;
    std::string polarity;
    std::string origin;
  };
  std::map<std::string, PostInfo> posts;
  std::map<std::pair<int, std::string>, std::vector<std::string>> malicious;  // (step, post) -> authors
  std::map<int, int> boosts;
  for (const auto& e : r.log.events) {
    if (e.kind == "post_publish") {
      const auto& origin = e.payload.at("origin_post_id");
      posts[e.payload.at("post_id")] = {e.step, e.payload.at("polarity"),
                                        origin.is_string() ? origin.get<std::string>() : ""};
    } else if (e.kind == "comment" && e.payload.at("agent_type") == "malicious") {
      malicious[{e.step, e.payload.at("post_id")}].push_back(e.payload.at("author_id"));
    } else if (e.kind == "boost") {
      ++boosts[e.step];
    }
  }
  int bad_counts = 0, in_window = 0, bad_clar = 0, clar_checked = 0;
  for (const auto& [id, p] : posts) {
    if (p.polarity != "adversarial") continue;
    for (int s = p.step; s < p.step + cfg.attack.window && s <= cfg.horizon; ++s) {
      ++in_window;
      const auto& authors = malicious[{s, id}];
      const std::set<std::string> uniq(authors.begin(), authors.end());
      if (authors.size() != 15 || uniq.size() != 15) ++bad_counts;
    }
    int clars = 0;
    for (const auto& [cid, c] : posts) {
      if (c.polarity == "clarification" && c.origin == id) {
        ++clars;
        if (c.step != p.step + cfg.clarification_delay) ++bad_clar;
      }
    }
    const bool due = p.step + cfg.clarification_delay <= cfg.horizon;
    if (clars != (due ? 1 : 0)) ++bad_clar;
    clar_checked += due ? 1 : 0;
  }
  // no malicious comments outside the window
  std::size_t stray = 0;
  for (const auto& [key, authors] : malicious) {
    const auto& p = posts[key.second];
    if (p.polarity != "adversarial" || key.first >= p.step + cfg.attack.window) stray += authors.size();
  }
  int max_boost = 0;
  for (const auto& [s, n] : boosts) max_boost = std::max(max_boost, n);
  const bool pass = in_window > 0 && bad_counts == 0 && stray == 0 && max_boost <= 2 &&
                    bad_clar == 0 && clar_checked > 0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%d item-rounds checked, %d off-count, %zu stray, max boosts/round %d, "
                "%d clarifications checked, %d misplaced",
                in_window, bad_counts, stray, max_boost, clar_checked, bad_clar);
  return {pass, buf};
}

Outcome c7_moderation() {
  const auto cfg = base(3, 7);
  const auto r = engine::run_scenario(cfg);
  std::map<std::string, int> created;
  std::set<std::string> taken;
  for (const auto& e : r.log.events) {
    if (e.kind == "post_publish") created[e.payload.at("post_id")] = e.step;
    if (e.kind == "takedown") taken.insert(e.payload.at("post_id").get<std::string>());
  }
  int verdicts = 0, late = 0, takedown_mismatch = 0, expected_takedowns = 0;
  for (const auto& e : r.log.events) {
    if (e.kind != "verdict") continue;
    ++verdicts;
    const std::string id = e.payload.at("post_id");
    if (e.step - created.at(id) != 3) ++late;
    const bool should = e.payload.at("label") == "false" &&
                        e.payload.at("confidence").get<double>() > 0.9;
    expected_takedowns += should ? 1 : 0;
    if (should != (taken.count(id) > 0)) ++takedown_mismatch;
  }

  // likes permutation: re-adjudicate every post with shuffled engagement
  moderation::ModerationParams mp;
  int label_changes = 0;
  Rng shuffle(5);
  std::vector<int> likes;
  for (const auto& p : r.world.posts) likes.push_back(p.likes);
  for (int round = 0; round < 20; ++round) {
    for (std::size_t i = likes.size(); i > 1; --i) {
      std::swap(likes[i - 1],
                likes[static_cast<std::size_t>(shuffle.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    }
    for (std::size_t i = 0; i < r.world.posts.size(); ++i) {
      Post a = r.world.posts[i];
      Post b = a;
      b.likes = likes[i];
      b.shares = likes[i] * 3;
      Rng ra(static_cast<std::uint64_t>(i)), rb(static_cast<std::uint64_t>(i));
      const auto va = moderation::adjudicate(a, 4, mp, ra);
      const auto vb = moderation::adjudicate(b, 4, mp, rb);
      if (va.label != vb.label || va.confidence != vb.confidence) ++label_changes;
    }
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%d verdicts, %d off-delay, %d takedowns (%d expected), %d takedown mismatches, "
                "%d label changes under like permutation",
                verdicts, late, static_cast<int>(taken.size()), expected_takedowns,
                takedown_mismatch, label_changes);
  return {verdicts > 0 && late == 0 && takedown_mismatch == 0 && label_changes == 0, buf};
}

struct SeedResult {
  double extremity = NAN;
  double sentiment = NAN;
  std::vector<double> rewards;
};

std::map<int, std::vector<SeedResult>> g_sweep;

void run_sweep() {
  if (!g_sweep.empty()) return;
  for (int kase = 2; kase <= 4; ++kase) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto cfg = base(kase, seed);
      const auto r = engine::run_scenario(cfg);
      const auto snaps = engine::compute_snapshots(cfg, r.world);
      SeedResult s;
      for (const auto& m : snaps) {
        if (m.t == 30) {
          s.extremity = m.extremity.value_or(NAN);
          s.sentiment = m.sentiment.value_or(NAN);
        }
      }
      s.rewards = r.rewards;
      g_sweep[kase].push_back(std::move(s));
    }
  }
}

Outcome c8_ordering() {
  run_sweep();
  std::map<int, double> ext, sen;
  for (int k = 2; k <= 4; ++k) {
    std::vector<double> e, s;
    for (const auto& r : g_sweep[k]) {
      e.push_back(r.extremity);
      s.push_back(r.sentiment);
    }
    ext[k] = median(e);
    sen[k] = median(s);
  }
  const bool pass = ext[4] < ext[3] && ext[3] < ext[2] && sen[4] > sen[3] && sen[3] > sen[2];
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "20 seeds, median extremity C4 %.2f < C3 %.2f < C2 %.2f; "
                "median sentiment C4 %.2f > C3 %.2f > C2 %.2f",
                ext[4], ext[3], ext[2], sen[4], sen[3], sen[2]);
  return {pass, buf};
}

Outcome c9_reward_shape() {
  run_sweep();
  std::vector<double> finals, early, late;
  for (const auto& r : g_sweep[4]) {
    const auto series = metrics::reward_series(r.rewards);
    finals.push_back(series.cumulative.back());
    const auto& avg = series.average;
    // changes of the running average: rounds 2-11 vs rounds 21-30
    std::vector<double> first, last;
    for (std::size_t t = 1; t <= 10; ++t) first.push_back(std::abs(avg[t] - avg[t - 1]));
    for (std::size_t t = avg.size() - 10; t < avg.size(); ++t) {
      last.push_back(std::abs(avg[t] - avg[t - 1]));
    }
    early.push_back(median(first));
    late.push_back(median(last));
  }
  const double fin = median(finals), e = median(early), l = median(late);
  return {fin > 0.0 && l < e,
          fmt("case 4, median cumulative reward %.4f; median |d avg| first 10 %.5f, last 10 %.5f",
              fin, e, l)};
}

Outcome c10_snapshot() {
  std::ifstream in(std::string(EVOCORPS_TEST_FIXTURES) + "/snapshot_comments.jsonl");
  std::vector<Comment> cs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    Comment c;
    c.id = j.at("comment_id");
    c.post_id = j.at("post_id");
    c.author_id = j.at("author_id");
    c.agent_type = parse_agent_type(j.at("agent_type").get<std::string>());
    c.time_step = j.at("time_step");
    c.likes = j.at("likes");
    c.stance = j.at("stance");
    c.sentiment = j.at("sentiment");
    c.toxicity = j.at("toxicity");
    c.evidence = j.at("evidence");
    cs.push_back(c);
  }
  metrics::ScriptedGrader g;
  std::vector<metrics::CommentGrades> grades;
  for (const auto& c : cs) grades.push_back(g.grade(c, "fixture"));

  // hand-computed: 30 eligible at t=10, 40 at t=20
  struct Expect {
    int t;
    std::size_t n;
    double sentiment, toxicity, extremity, aqs, fallacy, evidence;
  };
  const Expect want[] = {{10, 30, 75.0, 30.0, 50.0, 56.2, 100.0 / 3.0, 20.0},
                         {20, 40, 68.75, 22.5, 37.5, 57.15, 25.0, 15.0}};
  int off = 0;
  for (const auto& w : want) {
    const auto s = metrics::snapshot(cs, grades, w.t);
    auto near = [](const std::optional<double>& v, double x) {
      return v && std::abs(*v - x) <= 1e-9;
    };
    if (s.n_comments != w.n) ++off;
    off += !near(s.sentiment, w.sentiment) + !near(s.toxicity, w.toxicity) +
           !near(s.extremity, w.extremity) + !near(s.aqs, w.aqs) + !near(s.fallacy, w.fallacy) +
           !near(s.evidence, w.evidence);
  }
  return {off == 0, fmt("%g of 14 values off (t=10 and t=20)", off)};
}

Outcome c11_ablations() {
  auto cfg = base(4, 42);
  cfg.ablation.no_amplifiers = true;
  auto r = engine::run_scenario(cfg);
  int amp = 0;
  for (const auto& c : r.world.comments) amp += c.agent_type == AgentType::kAmplifier;

  cfg = base(4, 42);
  cfg.ablation.no_strategist = true;
  r = engine::run_scenario(cfg);
  int plans = 0, off8 = 0;
  for (const auto& e : r.log.events) {
    if (e.kind != "plan") continue;
    ++plans;
    if (e.payload.at("total_agents") != 8) ++off8;
  }

  std::ifstream in(std::string(EVOCORPS_TEST_FIXTURES) + "/lexicon_comments.json");
  const auto fx = json::parse(in);
  const Lexicon lex(fx.at("lexicon").get<std::vector<std::string>>());
  const double threshold = fx.at("threshold");
  int fixture_off = 0;
  for (const auto& kase : fx.at("cases")) {
    std::vector<Comment> cs;
    for (const auto& t : kase.at("texts")) {
      Comment c;
      c.text = t;
      cs.push_back(c);
    }
    std::vector<const Comment*> ptrs;
    for (const auto& c : cs) ptrs.push_back(&c);
    const auto a = team::lexicon_alert(ptrs, lex, threshold);
    if (a.alert != kase.at("alert").get<bool>() || a.hits != kase.at("hits").get<std::size_t>()) {
      ++fixture_off;
    }
  }

  cfg = base(4, 42);
  cfg.ablation.no_analyst = true;
  r = engine::run_scenario(cfg);
  int alerts = 0, weak_alerts = 0, analyses = 0;
  for (const auto& e : r.log.events) {
    if (e.kind == "analysis") ++analyses;
    if (e.kind != "alert") continue;
    ++alerts;
    if (!(e.payload.at("fraction").get<double>() > cfg.lexicon_threshold)) ++weak_alerts;
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "NoAmplifiers %d amplifier comments; NoStrategist %d plans, %d not 8; "
                "NoAnalyst fixture %d mismatches, %d run alerts (%d below threshold, %d analyses)",
                amp, plans, off8, fixture_off, alerts, weak_alerts, analyses);
  return {amp == 0 && plans > 0 && off8 == 0 && fixture_off == 0 && weak_alerts == 0 &&
              analyses == 0,
          buf};
}

Outcome c12_labels() {
  const double want[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  int off = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    const auto s = metrics::sentiment_score(metrics::kSentimentLabels[i]);
    const auto x = metrics::extremity_score(metrics::kExtremityLabels[i]);
    if (!s || *s != want[i]) ++off;
    if (!x || *x != want[i]) ++off;
  }
  return {off == 0, fmt("%g of 10 label scores differ", off)};
}

}  // namespace

int main() {
  report(1, "reward formula", c1_reward);
  report(2, "kb evolution", c2_kb);
  report(3, "memory gate", c3_memory);
  report(4, "weighted extremism", c4_extremism);
  report(5, "determinism", c5_determinism);
  report(6, "mechanism cardinalities", c6_mechanisms);
  report(7, "moderation semantics", c7_moderation);
  report(8, "qualitative ordering", c8_ordering);
  report(9, "reward dynamics", c9_reward_shape);
  report(10, "metric aggregation", c10_snapshot);
  report(11, "ablation contracts", c11_ablations);
  report(12, "label maps", c12_labels);
  return g_failed == 0 ? 0 : 1;
}

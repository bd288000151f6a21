#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "evocorps/engine.hpp"
#include "evocorps/error.hpp"
#include "evocorps/rng.hpp"
#include "evocorps/text.hpp"
#include "serialize.hpp"

namespace evocorps::engine {

using nlohmann::json;
namespace fs = std::filesystem;
using namespace detail;
using gateway::RoleTag;

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

std::string user_id_for(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "u%03zu", i + 1);
  return buf;
}

// Short human subject for templates: the record text up to its first clause.
std::string subject_of(const std::string& text) {
  std::string s = text;
  const auto cut = s.find_first_of(".;:!?");
  if (cut != std::string::npos) s = s.substr(0, cut);
  if (s.size() > 80) {
    s = s.substr(0, 80);
    const auto sp = s.rfind(' ');
    if (sp != std::string::npos && sp > 20) s = s.substr(0, sp);
  }
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

// Words contributed by the injection and correction templates. They are
// stripped so that an item, its variant and its correction share one topic.
const TokenSet& template_tokens() {
  static const TokenSet kTokens = [] {
    social::NewsRecord empty;
    return set_union(topic_tokens(social::adversarial_variant_text(empty)),
                     topic_tokens(social::clarification_text(empty)));
  }();
  return kTokens;
}

TokenSet post_topic(const std::string& record_text) {
  TokenSet out;
  const auto& strip = template_tokens();
  for (auto& t : topic_tokens(record_text)) {
    if (!std::binary_search(strip.begin(), strip.end(), t)) out.push_back(std::move(t));
  }
  if (out.empty()) out = topic_tokens(record_text);
  return out;
}

std::string json_object_in(const std::string& reply) {
  const auto open = reply.find('{');
  const auto close = reply.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) return {};
  return reply.substr(open, close - open + 1);
}

struct PendingDraft {
  int due_step = 0;
  team::AmplifierDraft draft;
  std::string post_id;
  std::string leader_comment_id;
  std::string topic;
  std::string counter_argument;
};

struct Intervention {
  team::StrategyPlan plan;
  std::string leader_digest;
  cognition::ObservationRef observation;
};

}  // namespace

// ---------------------------------------------------------------- impl ----

struct Simulation::Impl {
  ScenarioConfig cfg;
  std::unique_ptr<gateway::Gateway> owned_gw;
  gateway::Gateway* gw = nullptr;
  gateway::PromptLibrary prompts;
  social::PersonaPool personas;
  Lexicon extreme_lexicon;
  Lexicon toxicity_lexicon;
  std::unique_ptr<metrics::RemoteGrader> remote_grader;

  std::vector<social::NewsRecord> records;
  std::vector<NewsItem> schedule;
  std::map<std::string, std::string> subject_by_news;  // news id -> subject
  std::map<std::string, std::string> record_by_news;   // news id -> record text
  std::map<std::string, std::string> post_by_news;
  std::optional<NewsItem> stimulus;

  WorldState world;
  std::optional<cognition::KnowledgeBase> kb;
  cognition::ActionOutcomeMemory memory;
  RunLog log;
  std::uint64_t seq = 0;

  bool have_baseline = false;
  MeanFieldState prev_state;
  std::vector<double> rewards;
  std::vector<MeanFieldState> states;
  std::vector<ProbeRecord> probes;
  std::vector<std::string> tracked;
  std::vector<PendingDraft> pending;
  std::optional<Intervention> intervention;
  bool finished = false;

  bool remote() const { return !gw->scripted(); }
  bool is_case(CaseId c) const { return cfg.case_id == c; }
  bool adversary_on() const { return cfg.case_id != CaseId::k1; }

  void emit(int step, Phase phase, const std::string& actor, const std::string& kind,
            json payload) {
    EventRecord e;
    e.step = step;
    e.phase = phase;
    e.seq = seq++;
    e.actor = actor;
    e.kind = kind;
    e.payload = std::move(payload);
    log.events.push_back(std::move(e));
  }

  // ---------------------------------------------------------- setup ----

  void load_data() {
    const fs::path data = cfg.data_dir;
    records = social::load_news_jsonl(data / "news_stream.jsonl");
    const fs::path pdir = data / "personas";
    if (!fs::is_directory(pdir)) {
      throw Error(ErrorCode::kIo, "persona directory missing: " + pdir.string());
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(pdir)) {
      if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) personas.merge(social::load_personas(f));
    if (personas.neutral.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "neutral persona pool is empty");
    }
    if (adversary_on() && personas.negative.size() < cfg.attack.identities) {
      throw Error(ErrorCode::kInvalidConfig,
                  "negative persona pool has " + std::to_string(personas.negative.size()) +
                      " records; the attack needs " + std::to_string(cfg.attack.identities));
    }
    if (is_case(CaseId::k4) && !cfg.ablation.no_amplifiers && personas.positive.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "positive persona pool is empty");
    }
    const fs::path lex = data / "lexicon";
    if (fs::exists(lex / "negative_extreme.txt")) {
      extreme_lexicon = Lexicon::load(lex / "negative_extreme.txt");
    }
    if (fs::exists(lex / "toxicity.txt")) toxicity_lexicon = Lexicon::load(lex / "toxicity.txt");
    if (is_case(CaseId::k4) && cfg.ablation.no_analyst && extreme_lexicon.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "the analyst ablation needs lexicon/negative_extreme.txt");
    }
    if (fs::is_directory(cfg.prompt_dir)) prompts = gateway::PromptLibrary::load(cfg.prompt_dir);
  }

  void build_schedule() {
    const double fraction = adversary_on() ? cfg.adversarial_fraction : 0.0;
    schedule = social::build_stream(records, fraction, cfg.clarification_delay);
    for (const auto& r : records) {
      for (const auto& id : {r.id, r.id + "-adv", r.id + "-clar"}) {
        subject_by_news[id] = subject_of(r.text);
        record_by_news[id] = r.text;
      }
    }
    // The probe stimulus is the earliest adversarial item. A case without
    // injection still probes with the variant the first eligible record
    // would have produced.
    auto adv = social::build_stream(records, 1.0, cfg.clarification_delay);
    for (const auto& it : schedule) {
      if (it.polarity == Polarity::kAdversarial) {
        stimulus = it;
        break;
      }
    }
    if (!stimulus) {
      for (const auto& it : adv) {
        if (it.polarity == Polarity::kAdversarial) {
          stimulus = it;
          break;
        }
      }
    }
  }

  void init_world() {
    json start = {{"case", static_cast<int>(cfg.case_id)},
                  {"label", case_label(cfg)},
                  {"horizon", cfg.horizon},
                  {"population", cfg.population},
                  {"seed", cfg.seed},
                  {"lambda1", cfg.lambda1},
                  {"lambda2", cfg.lambda2},
                  {"eta", cfg.eta},
                  {"delta", cfg.delta},
                  {"epsilon_mem", cfg.epsilon_mem},
                  {"clarification_delay", cfg.clarification_delay},
                  {"factcheck_delay", cfg.factcheck_delay},
                  {"ablation", cfg.ablation.to_string()},
                  {"backend", cfg.backend.kind == gateway::BackendKind::kRemote ? "remote"
                                                                                : "scripted"}};
    emit(0, kInit, "engine", "run_start", start);

    for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.population); ++i) {
      Rng r = Rng::stream(cfg.seed, "init", 0, i);
      social::OrdinaryUser u;
      u.id = user_id_for(i);
      u.persona_ref = personas.neutral[i % personas.neutral.size()].id;
      u.profile = r.bernoulli(0.5) ? social::ProfileTag::kA : social::ProfileTag::kB;
      u.opinion = std::clamp(r.normal(0.0, 0.15), -1.0, 1.0);
      u.mood = r.uniform(0.45, 0.65);
      u.susceptibility = r.uniform(0.3, 0.9);
      u.activity = r.uniform(0.3, 0.8);
      world.users.push_back(u);
      emit(0, kInit, "engine", "user_init", user_json(u));
    }

    std::vector<std::size_t> order(world.users.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return world.users[a].activity > world.users[b].activity;
    });
    for (std::size_t i = 0; i < order.size() && i < cfg.probe_users; ++i) {
      tracked.push_back(world.users[order[i]].id);
    }

    if (is_case(CaseId::k4)) {
      kb.emplace(cfg.delta, cfg.eta);
      const fs::path seed_file = cfg.data_dir / "kb_seed.jsonl";
      if (fs::exists(seed_file)) {
        for (auto& item : cognition::load_evidence_jsonl(seed_file)) {
          emit(0, kInit, "engine", "kb_seed", {{"item", evidence_json(item)}});
          kb->seed(std::move(item));
        }
      }
      if (!cfg.memory_import.empty()) {
        memory = cognition::ActionOutcomeMemory::import_jsonl(cfg.memory_import);
        for (const auto& t : memory.tuples()) {
          emit(0, kInit, "engine", "memory_seed", {{"tuple", tuple_json(t)}});
        }
      }
      world.kb_items = kb->items();
      world.memory = memory.tuples();
    }

    if (remote()) {
      std::optional<metrics::ToxicityClient> tox;
      if (!cfg.toxicity_endpoint.empty()) {
        tox.emplace(cfg.toxicity_endpoint, cfg.toxicity_key_env, cfg.backend.timeout_ms);
      }
      remote_grader = std::make_unique<metrics::RemoteGrader>(*gw, prompts, toxicity_lexicon, tox);
    }
  }

  // -------------------------------------------------------- helpers ----

  Post& post_by_id(const std::string& id) { return world.posts.at(*post_index_of(id)); }

  std::vector<const Comment*> comments_on(const Post& p) const {
    std::vector<const Comment*> out;
    out.reserve(p.comments.size());
    for (auto idx : p.comments) out.push_back(&world.comments[idx]);
    return out;
  }

  std::vector<const Comment*> visible_comments(int step) const {
    std::vector<const Comment*> out;
    for (const auto& p : world.posts) {
      if (!p.visible_at(step)) continue;
      for (auto idx : p.comments) out.push_back(&world.comments[idx]);
    }
    return out;
  }

  std::string subject(const Post& p) const {
    auto it = subject_by_news.find(p.news_id);
    return it == subject_by_news.end() ? subject_of(p.text) : it->second;
  }

  const social::PersonaRecord* persona(const std::string& id) const {
    for (const auto* pool : {&personas.neutral, &personas.positive, &personas.negative}) {
      for (const auto& p : *pool) {
        if (p.id == id) return &p;
      }
    }
    return nullptr;
  }

  std::string add_comment(Comment c, int step, Phase phase, const std::string& actor) {
    const std::size_t idx = world.comments.size();
    c.id = comment_id_for(idx);
    post_by_id(c.post_id).comments.push_back(idx);
    emit(step, phase, actor, "comment", comment_to_json(c));
    world.comments.push_back(std::move(c));
    return world.comments.back().id;
  }

  void like_comment(const std::string& comment_id, int step, Phase phase,
                    const std::string& actor) {
    auto idx = comment_index_of(comment_id);
    world.comments.at(*idx).likes += 1;
    emit(step, phase, actor, "like_comment", {{"comment_id", comment_id}, {"delta", 1}});
  }

  std::string generate(RoleTag role, const std::map<std::string, std::string>& vars,
                       std::map<std::string, std::string> hints, const std::string& requester) {
    gateway::GenerationRequest req;
    req.role = role;
    if (remote()) {
      const auto r = prompts.render(role, vars);
      req.system_text = r.system;
      req.user_text = r.user;
      req.temperature = cfg.backend.generation_temperature;
    }
    req.hints = std::move(hints);
    req.requester = requester;
    return gw->complete(req).text;
  }

  std::string feed_text(const social::Feed& feed) const {
    std::string out;
    for (const auto& e : feed) {
      out += "Post " + e.post->id + " (likes " + std::to_string(e.post->likes) + "): " +
             e.post->text + "\n";
      for (const auto* c : e.top_comments) {
        out += "  Comment " + c->id + " by " + c->author_id + " (likes " +
               std::to_string(c->likes) + "): " + c->text + "\n";
      }
    }
    return out;
  }

  // --------------------------------------------------------- phases ----

  void phase_news(int step) {
    for (const auto& item : schedule) {
      if (item.publish_step != step) continue;
      Post p;
      p.id = post_id_for(world.posts.size());
      p.news_id = item.id;
      p.source_label = item.source_label;
      p.text = item.text;
      p.polarity = item.polarity;
      p.publish_step = item.publish_step;
      if (item.origin_id) {
        auto it = post_by_news.find(*item.origin_id);
        if (it != post_by_news.end()) p.origin_post_id = it->second;
      }
      auto rec = record_by_news.find(item.id);
      p.topic = post_topic(rec == record_by_news.end() ? item.text : rec->second);
      post_by_news[item.id] = p.id;
      json payload = post_json(p);
      payload.erase("likes");
      payload.erase("shares");
      payload.erase("comments");
      payload.erase("removed_from_step");
      payload.erase("verdict");
      const std::string kind = "post_publish";
      const std::string actor =
          item.polarity == Polarity::kClarification ? "clarification_desk" : "news";
      world.posts.push_back(std::move(p));
      emit(step, kNews, actor, kind, payload);
    }
  }

  void phase_adversary(int step) {
    Rng rng = Rng::stream(cfg.seed, "attack", step);
    const auto drafts = social::attack(world.posts, step, personas.negative.size(), cfg.attack, rng);
    for (const auto& d : drafts) {
      const auto& persona_rec = personas.negative[d.persona_index];
      const Post& post = post_by_id(d.post_id);
      Comment c;
      c.post_id = d.post_id;
      c.author_id = persona_rec.id;
      c.agent_type = AgentType::kMalicious;
      c.time_step = step;
      c.stance = d.stance;
      c.sentiment = d.sentiment;
      c.toxicity = d.toxicity;
      c.text = generate(RoleTag::kMalicious,
                        {{"persona", social::persona_description(persona_rec)},
                         {"post_content", post.text}},
                        {{"topic", subject(post)}, {"persona", persona_rec.id}}, persona_rec.id);
      add_comment(std::move(c), step, kAdversary, persona_rec.id);
    }
    for (const auto& b : social::boost(world.posts, world.comments, step, cfg.attack)) {
      auto idx = comment_index_of(b.comment_id);
      world.comments.at(*idx).likes += b.likes;
      emit(step, kAdversary, "adversary", "boost", {{"comment_id", b.comment_id}, {"delta", b.likes}});
    }
  }

  void admit_clarifications(int step) {
    for (const auto& p : world.posts) {
      if (p.polarity != Polarity::kClarification || p.publish_step != step) continue;
      TokenSet origin_topic;
      if (p.origin_post_id) origin_topic = post_by_id(*p.origin_post_id).topic;
      cognition::EvidenceItem item;
      item.id = "kb-" + p.id;
      auto rec = record_by_news.find(p.news_id);
      item.claim_text = rec == record_by_news.end() ? p.text : rec->second;
      item.persuasiveness = 0.5;
      item.topic_tags = p.topic;
      item.source_label = p.source_label;
      const double rel = kb->relevance(item.tokens(), origin_topic);
      const json item_j = evidence_json(item);
      const bool admitted = kb->admit(std::move(item), origin_topic);
      emit(step, kTeam, "analyst", "kb_admit",
           {{"admitted", admitted}, {"relevance", rel}, {"item", item_j}});
    }
  }

  std::optional<team::AnalysisReport> analyst(int step) {
    std::vector<const Post*> candidates;
    for (const auto& p : world.posts) {
      if (p.visible_at(step) && p.publish_step > step - cfg.feed.window) candidates.push_back(&p);
    }
    if (cfg.ablation.no_analyst) {
      const Post* best = nullptr;
      team::LexiconAlert best_alert;
      for (const auto* p : candidates) {
        const auto a = team::lexicon_alert(comments_on(*p), extreme_lexicon, cfg.lexicon_threshold);
        if (!a.alert) continue;
        if (best == nullptr || a.fraction > best_alert.fraction ||
            (a.fraction == best_alert.fraction && p->publish_step > best->publish_step)) {
          best = p;
          best_alert = a;
        }
      }
      if (best == nullptr) {
        emit(step, kTeam, "analyst", "analysis_idle", {{"posts_scanned", candidates.size()}});
        return std::nullopt;
      }
      emit(step, kTeam, "analyst", "alert",
           {{"post_id", best->id}, {"fraction", best_alert.fraction},
            {"hits", best_alert.hits}, {"total", best_alert.total}});
      return team::heuristic_report(*best, comments_on(*best));
    }

    std::optional<team::AnalysisReport> chosen;
    const Post* chosen_post = nullptr;
    for (const auto* p : candidates) {
      auto r = team::analyze(*p, comments_on(*p));
      if (!r.requires_intervention) continue;
      bool better = !chosen;
      if (chosen) {
        if (r.urgency != chosen->urgency) {
          better = r.urgency > chosen->urgency;
        } else if (r.weighted_score != chosen->weighted_score) {
          better = r.weighted_score > chosen->weighted_score;
        } else {
          better = p->publish_step > chosen_post->publish_step;
        }
      }
      if (better) {
        chosen = std::move(r);
        chosen_post = p;
      }
    }
    if (!chosen) {
      emit(step, kTeam, "analyst", "analysis_idle", {{"posts_scanned", candidates.size()}});
      return std::nullopt;
    }
    if (remote() && prompts.has(RoleTag::kAnalyst)) {
      std::string lines;
      for (const auto& b : chosen->breakdown) {
        const auto& c = world.comments[*comment_index_of(b.comment_id)];
        lines += "- [" + std::to_string(c.likes) + " likes] " + c.text + "\n";
      }
      const std::string reply =
          generate(RoleTag::kAnalyst,
                   {{"post_content", chosen_post->text}, {"comments", lines}},
                   {{"topic", subject(*chosen_post)}}, "analyst");
      try {
        const auto j = json::parse(json_object_in(reply));
        if (j.contains("core_viewpoint") && j["core_viewpoint"].is_string()) {
          chosen->core_viewpoint = j["core_viewpoint"].get<std::string>();
        }
      } catch (const json::exception&) {
        // keep the headline as the viewpoint
      }
    }
    emit(step, kTeam, "analyst", "analysis", report_json(*chosen));
    return chosen;
  }

  team::StrategyPlan strategist(const team::AnalysisReport& report, int step) {
    team::StrategyPlan p;
    if (cfg.ablation.no_strategist) {
      p = team::fixed_plan(report, *kb, step);
    } else {
      const TokenSet query = set_union(report.topic, topic_tokens(report.core_viewpoint));
      p = team::plan(report, *kb, memory.recall(query, cfg.recall_top_k), step);
      if (remote() && prompts.has(RoleTag::kStrategist)) {
        const std::string reply =
            generate(RoleTag::kStrategist,
                     {{"analysis", report_json(report).dump()},
                      {"core_viewpoint", report.core_viewpoint},
                      {"arguments", p.core_counter_argument}},
                     {{"argument", p.core_counter_argument}}, "strategist");
        try {
          const auto j = json::parse(json_object_in(reply));
          if (j.contains("leader_instruction") && j["leader_instruction"].is_object()) {
            const auto& li = j["leader_instruction"];
            p.leader_instruction.tone = li.value("tone", p.leader_instruction.tone);
            p.leader_instruction.style = li.value("style", p.leader_instruction.style);
            p.leader_instruction.target_audience =
                li.value("target_audience", p.leader_instruction.target_audience);
            p.leader_instruction.content_length =
                li.value("content_length", p.leader_instruction.content_length);
          }
        } catch (const json::exception&) {
          // the rule-based plan stands
        }
      }
    }
    emit(step, kTeam, "strategist", "plan", plan_json(p));
    return p;
  }

  std::string amplifier_text(const team::AmplifierDraft& d, const std::string& topic,
                             const std::string& counter, const std::string& leader_text,
                             const social::PersonaRecord& persona_rec) {
    std::string argument = counter;
    std::string source;
    if (d.evidence && !d.argument_id.empty()) {
      if (const auto* item = kb->find(d.argument_id)) {
        argument = item->claim_text;
        source = item->source_label;
      }
    }
    std::map<std::string, std::string> hints = {{"topic", topic},
                                                {"argument", argument},
                                                {"evidence", d.evidence ? "1" : "0"},
                                                {"role", d.role},
                                                {"persona", persona_rec.id}};
    if (!source.empty()) hints["source"] = source;
    return generate(RoleTag::kAmplifier,
                    {{"persona", social::persona_description(persona_rec)},
                     {"role", d.role},
                     {"leader_content", leader_text},
                     {"argument", argument}},
                    hints, persona_rec.id);
  }

  // Target of the amplifiers' likes: the leader's comment, or without a
  // leader the most-liked ordinary comment on the post.
  std::string like_target(const std::string& post_id, const std::string& leader_comment_id) {
    if (!leader_comment_id.empty()) return leader_comment_id;
    std::vector<const Comment*> pool;
    for (const auto* c : comments_on(post_by_id(post_id))) {
      if (c->agent_type == AgentType::kNormal) pool.push_back(c);
    }
    const auto top = social::rank_feed(pool, 1);
    return top.empty() ? std::string{} : top.front()->id;
  }

  void post_amplifier(const PendingDraft& pd, int step) {
    const auto& persona_rec = personas.positive[pd.draft.persona_index];
    std::string leader_text;
    if (!pd.leader_comment_id.empty()) {
      leader_text = world.comments[*comment_index_of(pd.leader_comment_id)].text;
    }
    Comment c;
    c.post_id = pd.post_id;
    c.author_id = persona_rec.id;
    c.agent_type = AgentType::kAmplifier;
    c.time_step = step;
    c.stance = pd.draft.stance;
    c.sentiment = pd.draft.sentiment;
    c.toxicity = pd.draft.toxicity;
    c.evidence = pd.draft.evidence;
    c.text = amplifier_text(pd.draft, pd.topic, pd.counter_argument, leader_text, persona_rec);
    add_comment(std::move(c), step, kTeam, persona_rec.id);
    const std::string target = like_target(pd.post_id, pd.leader_comment_id);
    if (!target.empty()) like_comment(target, step, kTeam, persona_rec.id);
  }

  void phase_team(int step) {
    admit_clarifications(step);
    auto report = analyst(step);
    if (report) {
      const auto p = strategist(*report, step);
      std::vector<const cognition::EvidenceItem*> args;
      for (const auto& id : p.argument_ids) {
        if (const auto* item = kb->find(id)) args.push_back(item);
      }
      const Post& target = post_by_id(report->post_id);
      std::string leader_comment_id;
      std::string leader_digest;
      if (!cfg.ablation.no_leader) {
        const auto out = team::generate_and_select(*gw, prompts, p, *report, args,
                                                   cfg.leader_candidates);
        json cands = json::array();
        for (std::size_t i = 0; i < out.candidates.size(); ++i) {
          cands.push_back({{"text", out.candidates[i].text},
                           {"angle", out.candidates[i].angle},
                           {"scores", out.evaluations[i].scores},
                           {"total", out.evaluations[i].total}});
        }
        emit(step, kTeam, "leader", "leader_candidates",
             {{"strategy_id", p.strategy_id}, {"candidates", cands},
              {"chosen_index", out.chosen_index}});
        Comment c;
        c.post_id = target.id;
        c.author_id = "leader";
        c.agent_type = AgentType::kLeader;
        c.time_step = step;
        c.text = out.chosen().text;
        c.stance = out.chosen().stance;
        c.sentiment = 0.8;
        c.toxicity = 0.02;
        c.evidence = !args.empty();
        leader_digest = sha256_hex(c.text);
        leader_comment_id = add_comment(std::move(c), step, kTeam, "leader");
      }
      if (!cfg.ablation.no_amplifiers) {
        Rng rng = Rng::stream(cfg.seed, "team", step);
        const auto batch = team::amplify(p, 0.0, personas.positive.size(), !args.empty(), rng);
        if (batch.pool_exhausted) {
          emit(step, kTeam, "amplifier", "warning",
               {{"message", "amplifier pool exhausted; personas reused"},
                {"requested", p.total_agents},
                {"pool", personas.positive.size()}});
        }
        std::vector<PendingDraft> now;
        for (const auto& d : batch.drafts) {
          PendingDraft pd{step + d.step_offset, d, target.id, leader_comment_id,
                          subject(target), p.core_counter_argument};
          if (d.step_offset == 0) {
            now.push_back(std::move(pd));
          } else {
            pending.push_back(std::move(pd));
          }
        }
        for (const auto& pd : now) post_amplifier(pd, step);
      }
      intervention = Intervention{p, leader_digest, {step, target.id, target.topic}};
    }
    // Drafts scheduled by earlier plans come after this round's pipeline.
    std::vector<PendingDraft> due;
    std::vector<PendingDraft> later;
    for (auto& pd : pending) {
      (pd.due_step <= step ? due : later).push_back(std::move(pd));
    }
    pending = std::move(later);
    for (const auto& pd : due) post_amplifier(pd, step);
  }

  struct Decision {
    std::size_t user = 0;
    std::vector<social::UserAction> actions;
    std::vector<std::string> dropped;
  };

  void remote_attributes(social::UserAction& a, const social::OrdinaryUser& u,
                         const std::string& post_id) {
    Comment probe;
    probe.post_id = post_id;
    probe.text = a.content;
    probe.agent_type = AgentType::kNormal;
    const auto g = remote_grader->grade(probe, post_by_id(post_id).text);
    const double sign = u.opinion < 0.0 ? -1.0 : 1.0;
    a.stance = g.extremity ? sign * *g.extremity : std::clamp(u.opinion, -1.0, 1.0);
    a.sentiment = g.sentiment ? *g.sentiment : u.mood;
    a.toxicity = g.toxicity ? *g.toxicity : social::toxicity_surrogate(std::abs(u.opinion), u.mood);
  }

  void phase_users(int step) {
    const social::Feed feed = social::build_feed(world.posts, world.comments, step, cfg.feed);
    const auto shown = social::feed_comments(feed);
    std::vector<Decision> decisions;
    std::vector<gateway::GenerationRequest> remote_requests;
    std::vector<std::size_t> remote_owner;

    for (std::size_t i = 0; i < world.users.size(); ++i) {
      auto& u = world.users[i];
      const auto& dyn = u.profile == social::ProfileTag::kA ? cfg.profile_a : cfg.profile_b;
      Rng rng = Rng::stream(cfg.seed, "users", step, i);
      if (!social::engages(u, dyn, rng)) continue;
      const auto updated = social::update_user(u, shown, dyn, rng);
      if (updated.opinion != u.opinion || updated.mood != u.mood) {
        u.opinion = updated.opinion;
        u.mood = updated.mood;
        emit(step, kUsers, u.id, "user_update",
             {{"user_id", u.id}, {"opinion", u.opinion}, {"mood", u.mood}});
      }
      Decision d;
      d.user = i;
      if (remote()) {
        const auto* pr = persona(u.persona_ref);
        std::string mem;
        for (const auto& m : u.memory) mem += "- " + m + "\n";
        const auto r = prompts.render(
            RoleTag::kOrdinaryUser,
            {{"persona", pr ? social::persona_description(*pr) : u.persona_ref},
             {"user_id", u.id},
             {"memory", mem},
             {"feed_content", feed_text(feed)}});
        gateway::GenerationRequest req;
        req.role = RoleTag::kOrdinaryUser;
        req.system_text = r.system;
        req.user_text = r.user;
        req.temperature = cfg.backend.generation_temperature;
        req.requester = u.id;
        remote_requests.push_back(std::move(req));
        remote_owner.push_back(decisions.size());
      } else {
        d.actions = social::session(u, feed, rng);
      }
      decisions.push_back(std::move(d));
    }

    if (!remote_requests.empty()) {
      const auto replies = gw->complete_batch(remote_requests, cfg.max_parallel);
      for (std::size_t k = 0; k < replies.size(); ++k) {
        auto& d = decisions[remote_owner[k]];
        if (!replies[k].ok()) {
          throw BackendError("ordinary_user", world.users[d.user].id + ": " + replies[k].error);
        }
        try {
          d.actions = social::parse_remote_actions(replies[k].response->text, feed, d.dropped);
        } catch (const Error& e) {
          d.dropped.push_back(replies[k].response->text);
        }
        for (auto& a : d.actions) {
          if (a.kind == social::ActionKind::kCommentPost) {
            remote_attributes(a, world.users[d.user], a.target);
          }
        }
      }
    } else {
      // Scripted comment text is a function of the drafted attributes.
      for (auto& d : decisions) {
        const auto& u = world.users[d.user];
        for (auto& a : d.actions) {
          if (a.kind != social::ActionKind::kCommentPost) continue;
          a.content = generate(RoleTag::kOrdinaryUser, {},
                               {{"stance", num(a.stance)},
                                {"sentiment", num(a.sentiment)},
                                {"toxicity", num(a.toxicity)},
                                {"topic", subject(post_by_id(a.target))},
                                {"user_id", u.id},
                                {"step", std::to_string(step)}},
                               u.id);
        }
      }
    }

    for (auto& d : decisions) {
      auto& u = world.users[d.user];
      for (const auto& raw : d.dropped) {
        emit(step, kUsers, u.id, "action_dropped", {{"user_id", u.id}, {"raw", raw}});
      }
      std::vector<std::string> summary;
      for (const auto& a : d.actions) {
        switch (a.kind) {
          case social::ActionKind::kLikePost:
            post_by_id(a.target).likes += 1;
            emit(step, kUsers, u.id, "like_post", {{"post_id", a.target}});
            break;
          case social::ActionKind::kSharePost:
            post_by_id(a.target).shares += 1;
            emit(step, kUsers, u.id, "share_post", {{"post_id", a.target}});
            break;
          case social::ActionKind::kCommentPost: {
            Comment c;
            c.post_id = a.target;
            c.author_id = u.id;
            c.agent_type = AgentType::kNormal;
            c.time_step = step;
            c.text = a.content;
            c.stance = std::clamp(a.stance, -1.0, 1.0);
            c.sentiment = std::clamp(a.sentiment, 0.0, 1.0);
            c.toxicity = std::clamp(a.toxicity, 0.0, 1.0);
            c.evidence = false;
            add_comment(std::move(c), step, kUsers, u.id);
            summary.push_back("commented on " + a.target + ": " + a.content);
            break;
          }
          case social::ActionKind::kLikeComment:
            like_comment(a.target, step, kUsers, u.id);
            summary.push_back("liked " + a.target);
            break;
          case social::ActionKind::kFollowUser:
            emit(step, kUsers, u.id, "follow_user", {{"user_id", a.target}});
            break;
          case social::ActionKind::kIgnore:
            emit(step, kUsers, u.id, "ignore", json::object());
            break;
        }
      }
      if (remote()) {
        std::string entry = "Step " + std::to_string(step) + ":";
        for (const auto& s : summary) entry += " " + s + ";";
        u.memory.push_back(entry);
        emit(step, kUsers, u.id, "user_memory", {{"user_id", u.id}, {"entry", entry}});
        if (step % 5 == 0) {
          const auto* pr = persona(u.persona_ref);
          try {
            const std::string reflection = gw->memory_reflection(
                pr ? social::persona_description(*pr) : u.persona_ref, u.memory);
            u.memory.push_back("Reflection: " + reflection);
            emit(step, kUsers, u.id, "user_memory",
                 {{"user_id", u.id}, {"entry", u.memory.back()}});
          } catch (const Error& e) {
            emit(step, kUsers, u.id, "reflection_skipped", {{"error", e.what()}});
          }
        }
      }
    }
  }

  void phase_moderation(int step) {
    moderation::ModerationParams params;
    params.delay = cfg.factcheck_delay;
    params.takedown_confidence = cfg.takedown_confidence;
    for (const auto idx : moderation::schedule_checks(world.posts, step, params)) {
      Post& p = world.posts[idx];
      Verdict v;
      if (remote()) {
        try {
          v = moderation::adjudicate_remote(p, step, *gw, prompts);
        } catch (const Error& e) {
          emit(step, kModeration, "factchecker", "factcheck_failed",
               {{"post_id", p.id}, {"error", e.what()}});
          continue;
        }
      } else {
        Rng rng = Rng::stream(cfg.seed, "moderation", step, idx);
        v = moderation::adjudicate(p, step, params, rng);
      }
      emit(step, kModeration, "factchecker", "verdict",
           {{"post_id", v.post_id},
            {"label", std::string(to_string(v.label))},
            {"confidence", v.confidence},
            {"issued_step", v.issued_step},
            {"publish_step", p.publish_step},
            {"explanation", v.explanation},
            {"sources", v.sources}});
      if (moderation::enforce(p, v, params)) {
        emit(step, kModeration, "factchecker", "takedown",
             {{"post_id", p.id}, {"removed_from_step", *p.removed_from_step}});
      } else {
        emit(step, kModeration, "factchecker", "label",
             {{"post_id", p.id}, {"label", std::string(to_string(v.label))}});
      }
    }
  }

  MeanFieldState measure(int step, const MeanFieldState& prev) const {
    return team::estimate_state(visible_comments(step), prev, step);
  }

  void phase_feedback(int step) {
    const MeanFieldState s = measure(step, prev_state);
    emit(step, kFeedback, "engine", "state", state_json(s));
    const metrics::RewardConfig rc{cfg.lambda1, cfg.lambda2};
    double r = 0.0;
    if (intervention) {
      const auto fb = team::feedback(prev_state, s, intervention->plan, intervention->leader_digest,
                                     intervention->observation, *kb, memory, rc,
                                     cfg.epsilon_mem, step);
      r = fb.reward;
      json items = json::array();
      for (const auto& id : intervention->plan.argument_ids) {
        items.push_back({{"id", id}, {"p", kb->find(id)->persuasiveness}});
      }
      emit(step, kFeedback, "analyst", "kb_reinforce", {{"reward", r}, {"items", items}});
      cognition::MemoryTuple t;
      if (fb.retained) t = memory.tuples().back();
      emit(step, kFeedback, "analyst", "memory_record",
           {{"retained", fb.retained},
            {"reward", r},
            {"strategy_id", intervention->plan.strategy_id},
            {"tuple", fb.retained ? tuple_json(t) : json(nullptr)}});
    } else {
      r = metrics::reward(prev_state, s, rc);
    }
    emit(step, kFeedback, "engine", "reward",
         {{"reward", r}, {"v_prev", prev_state.v}, {"e_prev", prev_state.e},
          {"v", s.v}, {"e", s.e}});
    rewards.push_back(r);
    states.push_back(s);
    prev_state = s;
    world.state = s;
    intervention.reset();
  }

  // ---------------------------------------------------------- round ----

  void step_once() {
    const int step = world.step + 1;
    for (const auto& id : tracked) {
      if (stimulus) probes.push_back(probe(id, step));
    }
    phase_news(step);
    if (adversary_on()) phase_adversary(step);
    if (!have_baseline) {
      prev_state = measure(step, {0.0, 0.5, 0});
      prev_state.step = 0;
      states.push_back(prev_state);
      have_baseline = true;
    }
    if (is_case(CaseId::k4)) phase_team(step);
    phase_users(step);
    if (is_case(CaseId::k3)) phase_moderation(step);
    phase_feedback(step);
    if (std::find(cfg.snapshot_steps.begin(), cfg.snapshot_steps.end(), step) !=
        cfg.snapshot_steps.end()) {
      emit(step, kSnapshot, "engine", "snapshot", {{"t", step}});
    }
    emit(step, kSnapshot, "engine", "step_end", {{"comments", world.comments.size()}});
    world.step = step;
    if (kb) world.kb_items = kb->items();
    world.memory = memory.tuples();
    if (step == cfg.horizon) {
      emit(step, kSnapshot, "engine", "run_end",
           {{"steps", step}, {"comments", world.comments.size()}, {"posts", world.posts.size()}});
      log.complete = true;
      finished = true;
    }
  }

  ProbeRecord probe(const std::string& user_id, int step) const {
    auto it = std::find_if(world.users.begin(), world.users.end(),
                           [&](const auto& u) { return u.id == user_id; });
    if (it == world.users.end()) throw Error(ErrorCode::kNotFound, "unknown user " + user_id);
    if (!stimulus) throw Error(ErrorCode::kNotFound, "no adversarial stimulus in the stream");
    const auto& u = *it;
    ProbeRecord rec;
    rec.step = step;
    rec.user_id = u.id;
    rec.stance = u.opinion;
    rec.sentiment = u.mood;
    gateway::GenerationRequest req;
    req.role = RoleTag::kProbe;
    req.requester = u.id;
    req.hints = {{"user_id", u.id}, {"stance", num(u.opinion)}, {"sentiment", num(u.mood)}};
    if (remote()) {
      const auto* pr = persona(u.persona_ref);
      std::string mem;
      for (const auto& m : u.memory) mem += "- " + m + "\n";
      const auto r = prompts.render(RoleTag::kProbe,
                                    {{"persona", pr ? social::persona_description(*pr) : u.persona_ref},
                                     {"user_id", u.id},
                                     {"memory", mem},
                                     {"post_content", stimulus->text}});
      req.system_text = r.system;
      req.user_text = r.user;
      req.temperature = cfg.backend.generation_temperature;
    }
    const std::string reply = gw->complete(req).text;
    rec.content = reply;
    try {
      const auto j = json::parse(json_object_in(reply));
      rec.content = j.value("content", reply);
      rec.rationale = j.value("reason", j.value("rationale", ""));
    } catch (const json::exception&) {
      rec.rationale = reply;
    }
    return rec;
  }
};

// ---------------------------------------------------------- simulation ----

namespace {

ScenarioConfig with_defaults(ScenarioConfig cfg) {
  if (cfg.data_dir.empty()) cfg.data_dir = default_data_dir();
  if (cfg.prompt_dir.empty()) cfg.prompt_dir = default_prompt_dir();
  return cfg;
}

}  // namespace

Simulation::Simulation(ScenarioConfig cfg) : impl_(std::make_unique<Impl>()) {
  impl_->cfg = with_defaults(std::move(cfg));
  validate(impl_->cfg);
  impl_->owned_gw = std::make_unique<gateway::Gateway>(gateway::make_backend(impl_->cfg.backend));
  impl_->gw = impl_->owned_gw.get();
  impl_->load_data();
  impl_->build_schedule();
  impl_->init_world();
}

Simulation::Simulation(ScenarioConfig cfg, gateway::Gateway& gw) : impl_(std::make_unique<Impl>()) {
  impl_->cfg = with_defaults(std::move(cfg));
  validate(impl_->cfg);
  impl_->gw = &gw;
  impl_->load_data();
  impl_->build_schedule();
  impl_->init_world();
}

Simulation::~Simulation() = default;

void Simulation::step() {
  if (done()) throw Error(ErrorCode::kInvalidArgument, "horizon reached");
  impl_->step_once();
}

bool Simulation::done() const { return impl_->finished || !impl_->log.error.empty(); }

int Simulation::current_step() const { return impl_->world.step; }

RunResult Simulation::run() {
  try {
    while (!done()) step();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBackend) throw;
    auto& im = *impl_;
    im.log.error = e.what();
    im.log.complete = false;
    std::string role;
    if (const auto* be = dynamic_cast<const BackendError*>(&e)) role = be->role_tag();
    im.emit(im.world.step + 1, kSnapshot, "engine", "run_abort",
            {{"error", e.what()}, {"role", role}});
  }
  RunResult r;
  r.log = impl_->log;
  r.world = impl_->world;
  r.rewards = impl_->rewards;
  r.states = impl_->states;
  r.probes = impl_->probes;
  return r;
}

ProbeRecord Simulation::probe_user(const std::string& user_id) const {
  return impl_->probe(user_id, impl_->world.step);
}

std::vector<std::string> Simulation::tracked_users() const { return impl_->tracked; }
const WorldState& Simulation::world() const { return impl_->world; }
const RunLog& Simulation::log() const { return impl_->log; }
const ScenarioConfig& Simulation::config() const { return impl_->cfg; }

const cognition::KnowledgeBase* Simulation::knowledge_base() const {
  return impl_->kb ? &*impl_->kb : nullptr;
}

std::uint64_t Simulation::gateway_requests() const { return impl_->gw->request_count(); }

RunResult run_scenario(const ScenarioConfig& cfg) {
  Simulation sim(cfg);
  return sim.run();
}

// ------------------------------------------------------------- outputs ----

std::vector<metrics::MetricSnapshot> compute_snapshots(const ScenarioConfig& cfg_in,
                                                       const WorldState& world,
                                                       gateway::Gateway* gw) {
  const ScenarioConfig cfg = with_defaults(cfg_in);
  std::unique_ptr<gateway::Gateway> owned;
  std::unique_ptr<metrics::Grader> grader;
  if (cfg.backend.kind == gateway::BackendKind::kScripted) {
    grader = std::make_unique<metrics::ScriptedGrader>(metrics::ToxicityMode::kAttribute);
  } else {
    if (gw == nullptr) {
      owned = std::make_unique<gateway::Gateway>(gateway::make_backend(cfg.backend));
      gw = owned.get();
    }
    Lexicon tox;
    const auto lex = cfg.data_dir / "lexicon" / "toxicity.txt";
    if (fs::exists(lex)) tox = Lexicon::load(lex);
    std::optional<metrics::ToxicityClient> client;
    if (!cfg.toxicity_endpoint.empty()) {
      client.emplace(cfg.toxicity_endpoint, cfg.toxicity_key_env, cfg.backend.timeout_ms);
    }
    grader = std::make_unique<metrics::RemoteGrader>(
        *gw, gateway::PromptLibrary::load(cfg.prompt_dir), tox, client);
  }

  std::map<std::string, std::size_t> counts;
  for (const auto& c : world.comments) ++counts[c.post_id];
  std::map<std::string, std::string> topic;
  for (const auto& p : world.posts) topic[p.id] = p.text;

  int t_max = 0;
  for (int t : cfg.snapshot_steps) t_max = std::max(t_max, t);
  // Only comments that can enter some snapshot are graded.
  std::vector<metrics::CommentGrades> grades(world.comments.size());
  for (std::size_t i = 0; i < world.comments.size(); ++i) {
    const auto& c = world.comments[i];
    if (!metrics::eligible(c, counts[c.post_id], t_max)) continue;
    grades[i] = grader->grade(c, topic[c.post_id]);
  }
  std::vector<metrics::MetricSnapshot> out;
  for (int t : cfg.snapshot_steps) out.push_back(metrics::snapshot(world.comments, grades, t));
  return out;
}

void write_outputs(const ScenarioConfig& cfg, const RunResult& result,
                   const std::vector<metrics::MetricSnapshot>& snapshots, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  auto open = [](const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + p.string());
    return f;
  };
  {
    auto f = open(out_dir / "run_log.jsonl");
    f << result.log.to_jsonl();
  }
  const std::string label = case_label(cfg);
  const fs::path scen = out_dir / "data" / ("scenario_" + label);
  for (const auto& p : result.world.posts) {
    const fs::path dir = scen / ("post-" + p.id);
    fs::create_directories(dir);
    auto f = open(dir / "comments.jsonl");
    for (auto idx : p.comments) f << comment_to_json(result.world.comments[idx]).dump() << '\n';
  }
  {
    auto f = open(out_dir / "metrics.csv");
    f << metrics::snapshot_csv_header() << '\n';
    for (const auto& s : snapshots) f << metrics::snapshot_csv_rows(label, s);
  }
  {
    auto f = open(out_dir / "reward.csv");
    f << "round,reward,cumulative,average\n";
    const auto series = metrics::reward_series(result.rewards);
    for (std::size_t i = 0; i < series.reward.size(); ++i) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f\n", i + 1, series.reward[i],
                    series.cumulative[i], series.average[i]);
      f << buf;
    }
  }
  {
    auto f = open(out_dir / "probes.jsonl");
    for (const auto& p : result.probes) f << p.to_json().dump() << '\n';
  }
  if (!cfg.memory_export.empty()) {
    auto f = open(cfg.memory_export.is_absolute() ? cfg.memory_export
                                                  : out_dir / cfg.memory_export);
    for (const auto& t : result.world.memory) f << tuple_json(t).dump() << '\n';
  }
}

}  // namespace evocorps::engine

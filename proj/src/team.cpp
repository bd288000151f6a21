#include "evocorps/team.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <regex>

#include "evocorps/error.hpp"

namespace evocorps::team {

MeanFieldState estimate_state(const std::vector<const Comment*>& comments,
                              const MeanFieldState& prev, int step) {
  if (comments.empty()) {
    MeanFieldState carried = prev;
    carried.step = step;
    return carried;
  }
  double total = 0.0;
  for (const auto* c : comments) total += c->likes + 1.0;
  MeanFieldState s;
  s.step = step;
  for (const auto* c : comments) {
    const double w = (c->likes + 1.0) / total;
    s.v += w * std::abs(c->stance);
    s.e += w * c->sentiment;
  }
  s.v = std::clamp(s.v, 0.0, 1.0);
  s.e = std::clamp(s.e, 0.0, 1.0);
  return s;
}

WeightedExtremism weighted_extremism(const std::vector<LeveledComment>& comments) {
  WeightedExtremism out;
  if (comments.empty()) return out;
  double total = 0.0;
  for (const auto& c : comments) total += c.likes + 1.0;
  for (const auto& c : comments) {
    const double contrib = c.level * (c.likes + 1.0) / total;
    out.contributions.push_back(contrib);
    out.score += contrib;
  }
  out.level = std::clamp(static_cast<int>(std::floor(out.score + 0.5)), 0, 4);
  return out;
}

int stance_level(double stance) {
  return static_cast<int>(std::lround(4.0 * std::clamp(std::abs(stance), 0.0, 1.0)));
}

std::string_view to_string(Heat h) {
  switch (h) {
    case Heat::kLow: return "LOW";
    case Heat::kModerate: return "MODERATE";
    case Heat::kHigh: return "HIGH";
    case Heat::kViral: return "VIRAL";
  }
  return "LOW";
}

Heat heat_for_likes(int total_likes) {
  if (total_likes > 100) return Heat::kViral;
  if (total_likes > 40) return Heat::kHigh;
  if (total_likes > 10) return Heat::kModerate;
  return Heat::kLow;
}

double heat_multiplier(Heat h) {
  switch (h) {
    case Heat::kLow: return 1.0;
    case Heat::kModerate: return 1.2;
    case Heat::kHigh:
    case Heat::kViral: return 1.5;
  }
  return 1.0;
}

int urgency_for(int extremism_level, double sentiment) {
  const int u = std::max(extremism_level, sentiment < 0.35 ? 3 : 0);
  return std::clamp(u, 1, 4);
}

bool trigger(const AnalysisReport& report) {
  return report.extremism_level >= 2 || report.sentiment_estimate < 0.35 ||
         report.high_liked_extreme;
}

namespace {

// likes desc, newer first, then id
std::vector<const Comment*> by_likes(std::vector<const Comment*> comments) {
  std::sort(comments.begin(), comments.end(), [](const Comment* a, const Comment* b) {
    if (a->likes != b->likes) return a->likes > b->likes;
    if (a->time_step != b->time_step) return a->time_step > b->time_step;
    return a->id < b->id;
  });
  return comments;
}

std::string headline(const Post& post) {
  constexpr std::size_t kMax = 160;
  return post.text.size() <= kMax ? post.text : post.text.substr(0, kMax);
}

}  // namespace

AnalysisReport analyze(const Post& post, const std::vector<const Comment*>& comments) {
  AnalysisReport r;
  r.post_id = post.id;
  r.core_viewpoint = headline(post);
  r.topic = post.topic;

  std::vector<LeveledComment> leveled;
  leveled.reserve(comments.size());
  int total_likes = post.likes;
  for (const auto* c : comments) {
    leveled.push_back({c->likes, stance_level(c->stance)});
    total_likes += c->likes;
  }
  const auto we = weighted_extremism(leveled);
  r.weighted_score = we.score;
  r.extremism_level = we.level;
  for (std::size_t i = 0; i < comments.size(); ++i) {
    r.breakdown.push_back(
        {comments[i]->id, comments[i]->likes, leveled[i].level, we.contributions[i]});
  }
  r.engagement = heat_for_likes(total_likes);
  r.sentiment_estimate = estimate_state(comments, {0.0, 0.5, 0}, 0).e;

  const auto ranked = by_likes(comments);
  for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) {
    if (stance_level(ranked[i]->stance) >= 3) r.high_liked_extreme = true;
    if (ranked[i]->agent_type == AgentType::kMalicious) r.amplification_risk = true;
  }
  r.urgency = urgency_for(r.extremism_level, r.sentiment_estimate);
  r.requires_intervention = trigger(r);
  return r;
}

LexiconAlert lexicon_alert(const std::vector<const Comment*>& comments,
                           const Lexicon& lexicon, double threshold) {
  LexiconAlert a;
  a.total = comments.size();
  for (const auto* c : comments) {
    if (lexicon.any_hit(c->text)) ++a.hits;
  }
  if (a.total > 0) a.fraction = static_cast<double>(a.hits) / static_cast<double>(a.total);
  a.alert = a.fraction > threshold;
  return a;
}

AnalysisReport heuristic_report(const Post& post, const std::vector<const Comment*>& comments) {
  AnalysisReport r;
  r.post_id = post.id;
  r.core_viewpoint = headline(post);
  r.topic = post.topic;
  r.extremism_level = 2;
  r.weighted_score = 2.0;
  int total_likes = post.likes;
  for (const auto* c : comments) total_likes += c->likes;
  r.engagement = heat_for_likes(total_likes);
  r.sentiment_estimate = 0.5;
  r.urgency = 2;
  r.requires_intervention = true;
  return r;
}

// ---------------------------------------------------------- strategist ----

std::string_view to_string(Timing t) {
  switch (t) {
    case Timing::kImmediate: return "immediate";
    case Timing::kStaggered: return "staggered";
    case Timing::kProgressive: return "progressive";
  }
  return "immediate";
}

Timing parse_timing(std::string_view s) {
  if (s == "immediate") return Timing::kImmediate;
  if (s == "staggered") return Timing::kStaggered;
  if (s == "progressive") return Timing::kProgressive;
  throw Error(ErrorCode::kParse, "unknown timing '" + std::string(s) + "'");
}

int base_agents(int extremism_level) {
  switch (std::clamp(extremism_level, 0, 4)) {
    case 4: return 30;
    case 3: return 15;
    case 2: return 8;
    default: return 5;  // level 0 only reaches planning through the sentiment trigger
  }
}

std::array<int, 4> split_roles(int total) {
  std::array<int, 4> out{};
  if (total <= 0) return out;
  const int q = total / 4;
  const int rem = total % 4;
  for (int i = 0; i < 4; ++i) out[i] = q + (i < rem ? 1 : 0);
  return out;
}

std::optional<Timing> memory_timing(const std::vector<cognition::MemoryTuple>& recalled) {
  if (recalled.empty()) return std::nullopt;
  std::vector<double> rewards;
  for (const auto& m : recalled) rewards.push_back(m.reward);
  std::sort(rewards.begin(), rewards.end());
  const std::size_t n = rewards.size();
  const double median =
      n % 2 == 1 ? rewards[n / 2] : 0.5 * (rewards[n / 2 - 1] + rewards[n / 2]);
  std::array<int, 3> votes{};
  for (const auto& m : recalled) {
    if (m.reward < median) continue;
    try {
      ++votes[static_cast<std::size_t>(parse_timing(m.action.timing))];
    } catch (const Error&) {
      // imported tuples may carry free-form timing text
    }
  }
  const auto best = std::max_element(votes.begin(), votes.end());
  if (*best == 0) return std::nullopt;
  return static_cast<Timing>(best - votes.begin());
}

namespace {

void attach_arguments(StrategyPlan& p, const AnalysisReport& report,
                      const cognition::KnowledgeBase& kb) {
  const TokenSet query = set_union(report.topic, topic_tokens(report.core_viewpoint));
  for (const auto& s : kb.select_arguments(query)) {
    p.argument_ids.push_back(s.item->id);
    p.leader_instruction.key_points.push_back(s.item->claim_text);
  }
  if (!p.leader_instruction.key_points.empty()) {
    p.core_counter_argument = p.leader_instruction.key_points.front();
  } else {
    p.core_counter_argument = "The viral framing leaves out the verified context.";
  }
  if (p.leader_instruction.key_points.size() > 3) p.leader_instruction.key_points.resize(3);
}

std::string strategy_id(const AnalysisReport& report, int step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "strat-%03d-%s", step, report.post_id.c_str());
  return buf;
}

}  // namespace

StrategyPlan plan(const AnalysisReport& report, const cognition::KnowledgeBase& kb,
                  const std::vector<cognition::MemoryTuple>& recalled, int step) {
  StrategyPlan p;
  p.strategy_id = strategy_id(report, step);
  p.post_id = report.post_id;
  const double scaled = base_agents(report.extremism_level) * heat_multiplier(report.engagement);
  // 15 * 1.2 is 18.000000000000004 in binary; trim that before the ceiling
  p.total_agents = static_cast<int>(std::ceil(scaled - 1e-9)) + (report.urgency >= 3 ? 2 : 0) +
                   (report.amplification_risk ? 1 : 0);
  p.role_distribution = split_roles(p.total_agents);
  p.timing = report.urgency >= 3 ? Timing::kImmediate : Timing::kStaggered;
  p.recalled = recalled.size();
  if (report.urgency < 3) {
    if (auto t = memory_timing(recalled)) p.timing = *t;
  }
  attach_arguments(p, report, kb);
  return p;
}

StrategyPlan fixed_plan(const AnalysisReport& report, const cognition::KnowledgeBase& kb,
                        int step) {
  StrategyPlan p;
  p.strategy_id = strategy_id(report, step);
  p.post_id = report.post_id;
  p.total_agents = 8;
  p.role_distribution = split_roles(8);
  p.timing = Timing::kImmediate;
  attach_arguments(p, report, kb);
  return p;
}

std::string plan_digest(const StrategyPlan& p) {
  std::string canon = p.strategy_id + "|" + p.post_id + "|" + std::to_string(p.total_agents);
  for (int r : p.role_distribution) canon += "|" + std::to_string(r);
  canon += "|" + std::string(to_string(p.timing)) + "|" + p.core_counter_argument;
  for (const auto& id : p.argument_ids) canon += "|" + id;
  return sha256_hex(canon);
}

// -------------------------------------------------------------- leader ----

Evaluation scripted_rubric(const LeaderCandidate& candidate,
                           const std::vector<const cognition::EvidenceItem*>& args,
                           const TokenSet& core_viewpoint_tokens) {
  auto band = [](double x) { return std::clamp(1 + static_cast<int>(std::floor(4.0 * x)), 1, 5); };
  double mean_p = 0.0;
  for (const auto* a : args) mean_p += a->persuasiveness;
  if (!args.empty()) mean_p /= static_cast<double>(args.size());
  Evaluation e;
  e.scores[0] = band(mean_p);
  e.scores[1] = band(args.empty() ? 0.5 : 1.0);
  e.scores[2] = 4;
  e.scores[3] = band(jaccard(topic_tokens(candidate.text), core_viewpoint_tokens));
  e.scores[4] = band(1.0 - std::abs(candidate.stance));
  for (int s : e.scores) e.total += s;
  return e;
}

std::size_t choose(const std::vector<Evaluation>& evaluations) {
  if (evaluations.empty()) throw Error(ErrorCode::kInvalidArgument, "no candidates to choose from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < evaluations.size(); ++i) {
    if (evaluations[i].total > evaluations[best].total) best = i;
  }
  return best;
}

std::optional<Evaluation> parse_usc_evaluation(const std::string& reply) {
  static const std::array<const char*, 5> kDims = {"Persuasiveness", "Logic", "Readability",
                                                   "Relevance", "Impact"};
  Evaluation e;
  for (std::size_t i = 0; i < kDims.size(); ++i) {
    const std::regex re(std::string(kDims[i]) + R"(\s*:\s*\**\s*([0-9]+(\.[0-9]+)?))",
                        std::regex::icase);
    std::smatch m;
    if (!std::regex_search(reply, m, re)) return std::nullopt;
    const double v = std::stod(m[1].str());
    if (v < 1.0 || v > 5.0) return std::nullopt;
    e.scores[i] = static_cast<int>(std::lround(v));
    e.total += e.scores[i];
  }
  return e;
}

LeaderOutput generate_and_select(gateway::Gateway& gw, const gateway::PromptLibrary& prompts,
                                 const StrategyPlan& plan, const AnalysisReport& report,
                                 const std::vector<const cognition::EvidenceItem*>& args,
                                 std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "need at least one leader candidate");
  std::string arg_text;
  for (const auto* a : args) {
    if (!arg_text.empty()) arg_text += " ";
    arg_text += a->claim_text;
  }
  const auto& ins = plan.leader_instruction;
  std::vector<gateway::GenerationRequest> requests;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string angle(kCreationAngles[i % kCreationAngles.size()]);
    const auto rendered = prompts.render(gateway::RoleTag::kLeaderCreate,
                                         {{"current_angle", angle},
                                          {"tone", ins.tone},
                                          {"target_audience", ins.target_audience},
                                          {"content_length", ins.content_length},
                                          {"core_viewpoint", report.core_viewpoint},
                                          {"core_counter_argument", plan.core_counter_argument},
                                          {"arguments", arg_text}});
    gateway::GenerationRequest req;
    req.role = gateway::RoleTag::kLeaderCreate;
    req.system_text = rendered.system;
    req.user_text = rendered.user;
    req.requester = "leader";
    req.hints = {{"angle", angle}, {"topic", report.core_viewpoint}, {"arguments", arg_text}};
    requests.push_back(std::move(req));
  }
  const auto replies = gw.complete_batch(requests);

  LeaderOutput out;
  const TokenSet core_tokens = topic_tokens(report.core_viewpoint);
  for (std::size_t i = 0; i < n; ++i) {
    if (!replies[i].ok()) {
      throw BackendError("leader_create", "leader candidate " + std::to_string(i) +
                                              " failed: " + replies[i].error);
    }
    LeaderCandidate c{replies[i].response->text, requests[i].hints.at("angle"), 0.0};
    Evaluation e = scripted_rubric(c, args, core_tokens);
    if (!gw.scripted()) {
      const auto rendered = prompts.render(gateway::RoleTag::kUscEvaluate,
                                           {{"content", c.text},
                                            {"evaluation_focus", "Focus: " + report.core_viewpoint}});
      gateway::GenerationRequest req;
      req.role = gateway::RoleTag::kUscEvaluate;
      req.system_text = rendered.system;
      req.user_text = rendered.user;
      req.temperature = 0.0;
      req.requester = "leader";
      if (auto parsed = parse_usc_evaluation(gw.complete(req).text)) e = *parsed;
    }
    out.candidates.push_back(std::move(c));
    out.evaluations.push_back(e);
  }
  out.chosen_index = choose(out.evaluations);
  return out;
}

// ----------------------------------------------------------- amplifier ----

std::vector<int> timing_offsets(Timing timing, int total) {
  std::vector<int> out;
  if (total <= 0) return out;
  out.reserve(static_cast<std::size_t>(total));
  switch (timing) {
    case Timing::kImmediate:
      out.assign(static_cast<std::size_t>(total), 0);
      break;
    case Timing::kStaggered: {
      const int first = (total + 1) / 2;
      for (int i = 0; i < total; ++i) out.push_back(i < first ? 0 : 1);
      break;
    }
    case Timing::kProgressive: {
      const int q = total / 3;
      const int rem = total % 3;
      for (int part = 0; part < 3; ++part) {
        const int size = q + (part < rem ? 1 : 0);
        for (int i = 0; i < size; ++i) out.push_back(part);
      }
      break;
    }
  }
  return out;
}

AmplifierBatch amplify(const StrategyPlan& plan, double counter_stance, std::size_t pool_size,
                       bool args_attached, Rng& rng) {
  AmplifierBatch batch;
  const int total = plan.total_agents;
  if (total <= 0) return batch;
  if (pool_size == 0) throw Error(ErrorCode::kInvalidConfig, "amplifier persona pool is empty");
  std::vector<std::size_t> personas;
  if (static_cast<std::size_t>(total) <= pool_size) {
    personas = rng.sample_without_replacement(pool_size, static_cast<std::size_t>(total));
  } else {
    batch.pool_exhausted = true;
    for (int i = 0; i < total; ++i) {
      personas.push_back(static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(pool_size) - 1)));
    }
  }
  const auto offsets = timing_offsets(plan.timing, total);
  std::size_t role = 0;
  int left_in_role = plan.role_distribution[0];
  for (int i = 0; i < total; ++i) {
    while (left_in_role == 0 && role + 1 < kAmplifierRoles.size()) {
      left_in_role = plan.role_distribution[++role];
    }
    --left_in_role;
    AmplifierDraft d;
    d.persona_index = personas[static_cast<std::size_t>(i)];
    d.role = std::string(kAmplifierRoles[role]);
    d.step_offset = offsets[static_cast<std::size_t>(i)];
    d.stance = std::clamp(counter_stance + rng.uniform(-0.2, 0.2), -1.0, 1.0);
    d.sentiment = rng.uniform(0.6, 0.9);
    d.toxicity = rng.uniform(0.0, 0.1);
    if (args_attached && !plan.argument_ids.empty()) {
      d.evidence = rng.bernoulli(0.8);
      if (d.evidence) {
        d.argument_id = plan.argument_ids[static_cast<std::size_t>(i) % plan.argument_ids.size()];
      }
    }
    batch.drafts.push_back(std::move(d));
  }
  return batch;
}

// ------------------------------------------------------------ feedback ----

FeedbackResult feedback(const MeanFieldState& prev, const MeanFieldState& next,
                        const StrategyPlan& plan, const std::string& leader_digest,
                        const cognition::ObservationRef& observation,
                        cognition::KnowledgeBase& kb, cognition::ActionOutcomeMemory& memory,
                        const metrics::RewardConfig& reward_cfg, double epsilon_mem, int step) {
  FeedbackResult out;
  out.reward = metrics::reward(prev, next, reward_cfg);
  kb.reinforce(out.reward, plan.argument_ids);
  cognition::MemoryTuple tuple;
  tuple.action.plan_digest = plan_digest(plan);
  tuple.action.leader_digest = leader_digest;
  tuple.action.amplifier_summary = "total=" + std::to_string(plan.total_agents);
  for (std::size_t i = 0; i < kAmplifierRoles.size(); ++i) {
    tuple.action.amplifier_summary += " " + std::string(kAmplifierRoles[i]) + "=" +
                                      std::to_string(plan.role_distribution[i]);
  }
  tuple.action.timing = std::string(to_string(plan.timing));
  tuple.observation = observation;
  tuple.reward = out.reward;
  tuple.step = step;
  out.retained = memory.record(std::move(tuple), epsilon_mem);
  return out;
}

}  // namespace evocorps::team

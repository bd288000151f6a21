#include "serialize.hpp"

namespace evocorps::engine::detail {

using nlohmann::json;

Comment comment_from_json(const json& j) {
  Comment c;
  c.id = j.at("comment_id").get<std::string>();
  c.post_id = j.at("post_id").get<std::string>();
  c.author_id = j.at("author_id").get<std::string>();
  c.agent_type = parse_agent_type(j.at("agent_type").get<std::string>());
  c.time_step = j.at("time_step").get<int>();
  c.text = j.at("text").get<std::string>();
  c.likes = j.at("likes").get<int>();
  c.stance = j.at("stance").get<double>();
  c.sentiment = j.at("sentiment").get<double>();
  c.toxicity = j.at("toxicity").get<double>();
  c.evidence = j.at("evidence").get<bool>();
  return c;
}

json post_json(const Post& p) {
  json j = {{"post_id", p.id},
            {"news_id", p.news_id},
            {"source_label", p.source_label},
            {"text", p.text},
            {"polarity", std::string(to_string(p.polarity))},
            {"publish_step", p.publish_step},
            {"topic", p.topic},
            {"likes", p.likes},
            {"shares", p.shares},
            {"comments", p.comments}};
  j["origin_post_id"] = p.origin_post_id ? json(*p.origin_post_id) : json(nullptr);
  j["removed_from_step"] = p.removed_from_step ? json(*p.removed_from_step) : json(nullptr);
  if (p.verdict) {
    j["verdict"] = {{"label", std::string(to_string(p.verdict->label))},
                    {"confidence", p.verdict->confidence},
                    {"issued_step", p.verdict->issued_step}};
  } else {
    j["verdict"] = nullptr;
  }
  return j;
}

json user_json(const social::OrdinaryUser& u) {
  return {{"user_id", u.id},
          {"persona_ref", u.persona_ref},
          {"opinion", u.opinion},
          {"mood", u.mood},
          {"susceptibility", u.susceptibility},
          {"activity", u.activity},
          {"profile", std::string(social::to_string(u.profile))},
          {"memory", u.memory}};
}

social::OrdinaryUser user_from_json(const json& j) {
  social::OrdinaryUser u;
  u.id = j.at("user_id").get<std::string>();
  u.persona_ref = j.at("persona_ref").get<std::string>();
  u.opinion = j.at("opinion").get<double>();
  u.mood = j.at("mood").get<double>();
  u.susceptibility = j.at("susceptibility").get<double>();
  u.activity = j.at("activity").get<double>();
  u.profile = j.at("profile").get<std::string>() == "B" ? social::ProfileTag::kB
                                                        : social::ProfileTag::kA;
  return u;
}

json evidence_json(const cognition::EvidenceItem& e) {
  return {{"id", e.id},
          {"claim_text", e.claim_text},
          {"persuasiveness", e.persuasiveness},
          {"topic_tags", e.topic_tags},
          {"source_label", e.source_label}};
}

cognition::EvidenceItem evidence_from_json(const json& j) {
  cognition::EvidenceItem e;
  e.id = j.at("id").get<std::string>();
  e.claim_text = j.at("claim_text").get<std::string>();
  e.persuasiveness = j.at("persuasiveness").get<double>();
  e.topic_tags = j.at("topic_tags").get<std::vector<std::string>>();
  e.source_label = j.at("source_label").get<std::string>();
  return e;
}

json tuple_json(const cognition::MemoryTuple& t) {
  return {{"step", t.step},
          {"reward", t.reward},
          {"action",
           {{"plan_digest", t.action.plan_digest},
            {"leader_digest", t.action.leader_digest},
            {"amplifier_summary", t.action.amplifier_summary},
            {"timing", t.action.timing}}},
          {"observation",
           {{"step", t.observation.step},
            {"post_id", t.observation.post_id},
            {"topic_tokens", t.observation.topic_tokens}}}};
}

cognition::MemoryTuple tuple_from_json(const json& j) {
  cognition::MemoryTuple t;
  t.step = j.at("step").get<int>();
  t.reward = j.at("reward").get<double>();
  const auto& a = j.at("action");
  t.action = {a.at("plan_digest").get<std::string>(), a.at("leader_digest").get<std::string>(),
              a.at("amplifier_summary").get<std::string>(), a.at("timing").get<std::string>()};
  const auto& o = j.at("observation");
  t.observation.step = o.at("step").get<int>();
  t.observation.post_id = o.at("post_id").get<std::string>();
  t.observation.topic_tokens = o.at("topic_tokens").get<TokenSet>();
  return t;
}

json report_json(const team::AnalysisReport& r) {
  json breakdown = json::array();
  for (const auto& b : r.breakdown) {
    breakdown.push_back({{"comment_id", b.comment_id},
                         {"likes", b.likes},
                         {"level", b.level},
                         {"weighted_contribution", b.weighted_contribution}});
  }
  return {{"post_id", r.post_id},
          {"core_viewpoint", r.core_viewpoint},
          {"extremism_level", r.extremism_level},
          {"weighted_score", r.weighted_score},
          {"breakdown", breakdown},
          {"engagement", std::string(team::to_string(r.engagement))},
          {"sentiment_estimate", r.sentiment_estimate},
          {"high_liked_extreme", r.high_liked_extreme},
          {"amplification_risk", r.amplification_risk},
          {"requires_intervention", r.requires_intervention},
          {"urgency", r.urgency}};
}

json plan_json(const team::StrategyPlan& p) {
  json roles = json::object();
  for (std::size_t i = 0; i < team::kAmplifierRoles.size(); ++i) {
    roles[std::string(team::kAmplifierRoles[i])] = p.role_distribution[i];
  }
  const auto& li = p.leader_instruction;
  return {{"strategy_id", p.strategy_id},
          {"post_id", p.post_id},
          {"total_agents", p.total_agents},
          {"role_distribution", roles},
          {"timing", std::string(team::to_string(p.timing))},
          {"core_counter_argument", p.core_counter_argument},
          {"argument_ids", p.argument_ids},
          {"recalled", p.recalled},
          {"leader_instruction",
           {{"tone", li.tone},
            {"style", li.style},
            {"key_points", li.key_points},
            {"target_audience", li.target_audience},
            {"content_length", li.content_length}}}};
}

json state_json(const MeanFieldState& s) { return {{"v", s.v}, {"e", s.e}, {"step", s.step}}; }

}  // namespace evocorps::engine::detail

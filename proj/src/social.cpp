#include "evocorps/social.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "evocorps/error.hpp"

namespace evocorps::social {

using nlohmann::json;

// ---------------------------------------------------------------- news ----

std::vector<NewsRecord> load_news_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open news file " + path.string());
  std::vector<NewsRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      NewsRecord r;
      r.id = j.at("id").get<std::string>();
      r.source_label = j.value("source_label", "");
      r.text = j.at("text").get<std::string>();
      r.step = j.at("step").get<int>();
      r.tag = j.value("tag", "");
      if (r.step < 1) throw Error(ErrorCode::kParse, "step must be >= 1");
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse,
                  path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse,
                  path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string adversarial_variant_text(const NewsRecord& record) {
  return "SHOCKING: " + record.text +
         " They are hiding what this really means, and nobody is being held "
         "accountable.";
}

std::string clarification_text(const NewsRecord& record) {
  return "Fact check on recent viral claims: the exaggerated version circulating "
         "is misleading. What was actually reported: " +
         record.text;
}

std::vector<NewsItem> build_stream(const std::vector<NewsRecord>& records,
                                   double adversarial_fraction,
                                   int clarification_delay) {
  if (records.empty()) throw Error(ErrorCode::kInvalidArgument, "news records are empty");
  if (!(adversarial_fraction >= 0.0 && adversarial_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "adversarial_fraction must lie in [0,1]");
  }
  if (clarification_delay < 1) {
    throw Error(ErrorCode::kInvalidArgument, "clarification_delay must be >= 1");
  }

  std::vector<const NewsRecord*> ordered;
  for (const auto& r : records) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
    return a->step != b->step ? a->step < b->step : a->id < b->id;
  });

  std::set<const NewsRecord*> selected;
  std::size_t i = 0;
  for (const auto* r : ordered) {
    if (r->tag == "benign") continue;
    const double lo = std::ceil(static_cast<double>(i) * adversarial_fraction);
    const double hi = std::ceil(static_cast<double>(i + 1) * adversarial_fraction);
    if (hi > lo) selected.insert(r);
    ++i;
  }

  std::vector<NewsItem> out;
  for (const auto* r : ordered) {
    if (!selected.contains(r)) {
      out.push_back({r->id, r->source_label, r->text, Polarity::kBenign, r->step, {}});
      continue;
    }
    const std::string adv_id = r->id + "-adv";
    out.push_back({adv_id, r->source_label, adversarial_variant_text(*r),
                   Polarity::kAdversarial, r->step, {}});
    out.push_back({r->id + "-clar", "fact-check desk", clarification_text(*r),
                   Polarity::kClarification, r->step + clarification_delay, adv_id});
  }
  std::stable_sort(out.begin(), out.end(), [](const NewsItem& a, const NewsItem& b) {
    return a.publish_step < b.publish_step;
  });
  return out;
}

// ---------------------------------------------------------------- feed ----

std::vector<const Comment*> rank_feed(std::vector<const Comment*> comments,
                                      std::size_t k) {
  std::sort(comments.begin(), comments.end(), [](const Comment* a, const Comment* b) {
    if (a->likes != b->likes) return a->likes > b->likes;
    if (a->time_step != b->time_step) return a->time_step > b->time_step;
    return a->id < b->id;
  });
  if (comments.size() > k) comments.resize(k);
  return comments;
}

double hotness(const Post& post, const std::vector<Comment>& comments, int step) {
  double likes = post.likes;
  for (auto idx : post.comments) likes += comments[idx].likes;
  const double age = std::max(0, step - post.publish_step);
  return (1.0 + static_cast<double>(post.comments.size()) + likes) / (1.0 + age);
}

Feed build_feed(const std::vector<Post>& posts, const std::vector<Comment>& comments,
                int step, const FeedParams& params) {
  std::vector<std::pair<double, const Post*>> candidates;
  for (const auto& p : posts) {
    if (!p.visible_at(step) || step - p.publish_step >= params.window) continue;
    candidates.emplace_back(hotness(p, comments, step), &p);
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    if (a.second->publish_step != b.second->publish_step) {
      return a.second->publish_step > b.second->publish_step;
    }
    return a.second->id < b.second->id;
  });
  Feed feed;
  for (const auto& [score, post] : candidates) {
    if (feed.size() >= params.feed_size) break;
    std::vector<const Comment*> thread;
    thread.reserve(post->comments.size());
    for (auto idx : post->comments) thread.push_back(&comments[idx]);
    feed.push_back({post, rank_feed(std::move(thread), params.top_k)});
  }
  return feed;
}

std::vector<const Comment*> feed_comments(const Feed& feed) {
  std::vector<const Comment*> out;
  for (const auto& entry : feed) {
    out.insert(out.end(), entry.top_comments.begin(), entry.top_comments.end());
  }
  return out;
}

// --------------------------------------------------------------- users ----

std::string_view to_string(ProfileTag tag) { return tag == ProfileTag::kA ? "A" : "B"; }

OrdinaryUser update_user(const OrdinaryUser& user,
                         const std::vector<const Comment*>& visible,
                         const UserDynamics& dynamics, Rng& rng) {
  if (visible.empty()) return user;
  double total = 0.0;
  for (const auto* c : visible) total += c->likes + 1.0;
  double mu = 0.0;
  double nu = 0.0;
  for (const auto* c : visible) {
    const double w = (c->likes + 1.0) / total;
    mu += w * c->stance;
    nu += w * c->sentiment;
  }
  const double rate = user.susceptibility * dynamics.beta;
  const double xi = rng.normal(0.0, dynamics.noise_sd);
  OrdinaryUser out = user;
  out.opinion = std::clamp(user.opinion + rate * (mu - user.opinion) + xi, -1.0, 1.0);
  out.mood = std::clamp(user.mood + rate * (nu - user.mood), 0.0, 1.0);
  return out;
}

std::string_view to_string(ActionKind k) {
  switch (k) {
    case ActionKind::kLikePost: return "like-post";
    case ActionKind::kSharePost: return "share-post";
    case ActionKind::kCommentPost: return "comment-post";
    case ActionKind::kLikeComment: return "like-comment";
    case ActionKind::kFollowUser: return "follow-user";
    case ActionKind::kIgnore: return "ignore";
  }
  return "ignore";
}

ActionKind parse_action_kind(std::string_view s) {
  static constexpr std::array kAll = {ActionKind::kLikePost, ActionKind::kSharePost,
                                      ActionKind::kCommentPost, ActionKind::kLikeComment,
                                      ActionKind::kFollowUser, ActionKind::kIgnore};
  for (auto k : kAll) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::kParse, "unknown action '" + std::string(s) + "'");
}

double toxicity_surrogate(double abs_opinion, double mood) {
  return std::clamp(0.1 + 0.6 * abs_opinion * (1.0 - mood), 0.0, 1.0);
}

namespace {

// Session mix; order matches the cumulative draw below.
constexpr std::array<std::pair<ActionKind, double>, 6> kActionWeights = {{
    {ActionKind::kCommentPost, 0.30},
    {ActionKind::kLikeComment, 0.30},
    {ActionKind::kLikePost, 0.15},
    {ActionKind::kSharePost, 0.10},
    {ActionKind::kFollowUser, 0.10},
    {ActionKind::kIgnore, 0.05},
}};

ActionKind draw_kind(Rng& rng) {
  double u = rng.uniform();
  for (const auto& [kind, w] : kActionWeights) {
    if (u < w) return kind;
    u -= w;
  }
  return ActionKind::kIgnore;
}

constexpr double kCommentStanceSd = 0.1;

}  // namespace

bool engages(const OrdinaryUser& user, const UserDynamics& dynamics, Rng& rng) {
  return rng.bernoulli(user.activity * dynamics.activity_scale);
}

std::vector<UserAction> act(const OrdinaryUser& user, const Feed& feed,
                            const UserDynamics& dynamics, Rng& rng) {
  if (!engages(user, dynamics, rng)) return {};
  return session(user, feed, rng);
}

std::vector<UserAction> session(const OrdinaryUser& user, const Feed& feed, Rng& rng) {
  std::vector<UserAction> actions;
  const auto n = rng.uniform_int(5, 8);
  const auto visible = feed_comments(feed);
  std::set<std::string> liked;
  std::set<std::string> followed;

  // The comment whose stance sits closest to the user's, not yet used.
  auto closest = [&](const std::set<std::string>& used,
                     bool skip_self) -> const Comment* {
    const Comment* best = nullptr;
    for (const auto* c : visible) {
      if (used.contains(skip_self ? c->author_id : c->id)) continue;
      if (skip_self && c->author_id == user.id) continue;
      if (best == nullptr) {
        best = c;
        continue;
      }
      const double d = std::abs(c->stance - user.opinion);
      const double bd = std::abs(best->stance - user.opinion);
      if (d < bd || (d == bd && c->likes > best->likes)) best = c;
    }
    return best;
  };

  for (std::int64_t i = 0; i < n; ++i) {
    UserAction a;
    a.kind = draw_kind(rng);
    const FeedEntry* entry = nullptr;
    if (!feed.empty()) {
      entry = &feed[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(feed.size()) - 1))];
    }
    switch (a.kind) {
      case ActionKind::kLikePost:
      case ActionKind::kSharePost:
        if (entry == nullptr) {
          a.kind = ActionKind::kIgnore;
          break;
        }
        a.target = entry->post->id;
        break;
      case ActionKind::kCommentPost: {
        if (entry == nullptr) {
          a.kind = ActionKind::kIgnore;
          break;
        }
        a.target = entry->post->id;
        a.stance = std::clamp(user.opinion + rng.normal(0.0, kCommentStanceSd), -1.0, 1.0);
        a.sentiment = user.mood;
        a.toxicity = toxicity_surrogate(std::abs(user.opinion), user.mood);
        break;
      }
      case ActionKind::kLikeComment: {
        const Comment* c = closest(liked, false);
        if (c == nullptr) {
          a.kind = ActionKind::kIgnore;
          break;
        }
        liked.insert(c->id);
        a.target = c->id;
        break;
      }
      case ActionKind::kFollowUser: {
        const Comment* c = closest(followed, true);
        if (c == nullptr) {
          a.kind = ActionKind::kIgnore;
          break;
        }
        followed.insert(c->author_id);
        a.target = c->author_id;
        break;
      }
      case ActionKind::kIgnore:
        break;
    }
    actions.push_back(std::move(a));
  }
  return actions;
}

std::vector<UserAction> parse_remote_actions(const std::string& reply, const Feed& feed,
                                             std::vector<std::string>& dropped) {
  const auto open = reply.find('{');
  const auto close = reply.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw Error(ErrorCode::kParse, "action reply carries no JSON object: " + reply);
  }
  json j;
  try {
    j = json::parse(reply.substr(open, close - open + 1));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("action reply: ") + e.what());
  }
  std::set<std::string> posts;
  std::set<std::string> comments;
  std::set<std::string> users;
  for (const auto& e : feed) {
    posts.insert(e.post->id);
    for (const auto* c : e.top_comments) {
      comments.insert(c->id);
      users.insert(c->author_id);
    }
  }
  std::vector<UserAction> out;
  if (!j.contains("actions") || !j["actions"].is_array()) return out;
  for (const auto& item : j["actions"]) {
    if (out.size() >= 8) {
      dropped.push_back(item.dump());
      continue;
    }
    try {
      UserAction a;
      a.kind = parse_action_kind(item.at("action").get<std::string>());
      if (item.contains("target") && item["target"].is_string()) {
        a.target = item["target"].get<std::string>();
      }
      if (item.contains("content") && item["content"].is_string()) {
        a.content = item["content"].get<std::string>();
      }
      bool ok = true;
      switch (a.kind) {
        case ActionKind::kLikePost:
        case ActionKind::kSharePost:
        case ActionKind::kCommentPost: ok = posts.contains(a.target); break;
        case ActionKind::kLikeComment: ok = comments.contains(a.target); break;
        case ActionKind::kFollowUser: ok = users.contains(a.target); break;
        case ActionKind::kIgnore: a.target.clear(); break;
      }
      if (a.kind == ActionKind::kCommentPost && a.content.empty()) ok = false;
      if (ok) {
        out.push_back(std::move(a));
      } else {
        dropped.push_back(item.dump());
      }
    } catch (const std::exception&) {
      dropped.push_back(item.dump());
    }
  }
  return out;
}

// ----------------------------------------------------------- adversary ----

bool in_attack_window(const Post& post, int step, int window) {
  return post.polarity == Polarity::kAdversarial && post.visible_at(step) &&
         post.publish_step <= step && post.publish_step > step - window;
}

std::vector<MaliciousDraft> attack(const std::vector<Post>& posts, int step,
                                   std::size_t pool_size, const AttackParams& params,
                                   Rng& rng) {
  std::vector<MaliciousDraft> out;
  for (const auto& post : posts) {
    if (!in_attack_window(post, step, params.window)) continue;
    if (pool_size < params.identities) {
      throw Error(ErrorCode::kInvalidConfig, "malicious pool smaller than " +
                                                 std::to_string(params.identities));
    }
    for (auto idx : rng.sample_without_replacement(pool_size, params.identities)) {
      MaliciousDraft d;
      d.post_id = post.id;
      d.persona_index = idx;
      d.stance = rng.uniform(-1.0, -0.8);
      d.sentiment = rng.uniform(0.05, 0.2);
      d.toxicity = rng.uniform(0.6, 1.0);
      out.push_back(std::move(d));
    }
  }
  return out;
}

std::vector<BoostEvent> boost(const std::vector<Post>& posts,
                              const std::vector<Comment>& comments, int step,
                              const AttackParams& params) {
  std::vector<const Comment*> candidates;
  for (const auto& post : posts) {
    if (!in_attack_window(post, step, params.window)) continue;
    for (auto idx : post.comments) {
      if (comments[idx].agent_type == AgentType::kMalicious) {
        candidates.push_back(&comments[idx]);
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Comment* a, const Comment* b) {
    const double sa = std::abs(a->stance);
    const double sb = std::abs(b->stance);
    if (sa != sb) return sa > sb;
    if (a->likes != b->likes) return a->likes > b->likes;
    return a->id < b->id;
  });
  std::vector<BoostEvent> out;
  for (std::size_t i = 0; i < candidates.size() && i < params.boosted_per_round; ++i) {
    out.push_back({candidates[i]->id, params.boost_likes});
  }
  return out;
}

// ------------------------------------------------------------ personas ----

std::string_view to_string(PersonaType t) {
  switch (t) {
    case PersonaType::kNeutral: return "neutral";
    case PersonaType::kPositive: return "positive";
    case PersonaType::kNegative: return "negative";
  }
  return "neutral";
}

void PersonaPool::merge(PersonaPool other) {
  auto append = [](auto& dst, auto& src) {
    dst.insert(dst.end(), std::make_move_iterator(src.begin()),
               std::make_move_iterator(src.end()));
  };
  append(neutral, other.neutral);
  append(positive, other.positive);
  append(negative, other.negative);
}

namespace {

[[noreturn]] void missing(const std::string& id, const std::string& field) {
  throw Error(ErrorCode::kParse,
              "persona '" + id + "': missing or malformed field '" + field + "'");
}

std::string required_string(const json& obj, const char* key, const std::string& id,
                            const std::string& path) {
  if (!obj.contains(key)) missing(id, path);
  const auto& v = obj[key];
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  missing(id, path);
}

PersonaRecord parse_persona(const json& j, std::size_t position) {
  std::string id = j.contains("id") && j["id"].is_string()
                       ? j["id"].get<std::string>()
                       : "#" + std::to_string(position);
  if (!j.is_object()) missing(id, "<record>");
  PersonaRecord p;
  p.id = required_string(j, "id", id, "id");
  const std::string type = required_string(j, "type", id, "type");
  if (type == "neutral") {
    p.type = PersonaType::kNeutral;
  } else if (type == "positive") {
    p.type = PersonaType::kPositive;
  } else if (type == "negative") {
    p.type = PersonaType::kNegative;
  } else {
    missing(id, "type");
  }
  p.name = required_string(j, "name", id, "name");
  if (!j.contains("demographics") || !j["demographics"].is_object()) missing(id, "demographics");
  const auto& demo = j["demographics"];
  p.age = required_string(demo, "age", id, "demographics.age");
  p.region = required_string(demo, "region", id, "demographics.region");
  if (j.contains("profession")) {
    p.profession = required_string(j, "profession", id, "profession");
  } else if (demo.contains("profession")) {
    p.profession = required_string(demo, "profession", id, "demographics.profession");
  } else {
    missing(id, "profession");
  }
  p.background = required_string(j, "background", id, "background");
  if (!j.contains("personality_traits") || !j["personality_traits"].is_array()) {
    missing(id, "personality_traits");
  }
  for (const auto& t : j["personality_traits"]) {
    if (!t.is_string()) missing(id, "personality_traits");
    p.personality_traits.push_back(t.get<std::string>());
  }
  if (!j.contains("communication_style") || !j["communication_style"].is_object()) {
    missing(id, "communication_style");
  }
  const auto& style = j["communication_style"];
  p.tone = required_string(style, "tone", id, "communication_style.tone");
  p.engagement_level =
      required_string(style, "engagement_level", id, "communication_style.engagement_level");
  p.content_preference = style.value("content_preference", "");
  p.argument_approach = style.value("argument_approach", "");
  return p;
}

}  // namespace

PersonaPool load_personas(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  if (!j.is_array()) throw Error(ErrorCode::kParse, path.string() + ": expected a JSON array");
  PersonaPool pool;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < j.size(); ++i) {
    PersonaRecord p = parse_persona(j[i], i);
    if (!seen.insert(p.id).second) {
      throw Error(ErrorCode::kDuplicate, "persona '" + p.id + "' appears twice");
    }
    switch (p.type) {
      case PersonaType::kNeutral: pool.neutral.push_back(std::move(p)); break;
      case PersonaType::kPositive: pool.positive.push_back(std::move(p)); break;
      case PersonaType::kNegative: pool.negative.push_back(std::move(p)); break;
    }
  }
  return pool;
}

std::string persona_description(const PersonaRecord& p) {
  std::string out = p.name + ", " + p.age + ", " + p.profession + " from " + p.region +
                    ". " + p.background;
  if (!p.personality_traits.empty()) {
    out += " Traits: ";
    for (std::size_t i = 0; i < p.personality_traits.size(); ++i) {
      if (i) out += "; ";
      out += p.personality_traits[i];
    }
    out += ".";
  }
  out += " Tone: " + p.tone + ". Engagement: " + p.engagement_level + ".";
  return out;
}

}  // namespace evocorps::social

#include "evocorps/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "evocorps/error.hpp"
#include "evocorps/rng.hpp"
#include "evocorps/text.hpp"
#include "serialize.hpp"

#ifndef EVOCORPS_DATA_DIR
#define EVOCORPS_DATA_DIR "data"
#endif
#ifndef EVOCORPS_PROMPT_DIR
#define EVOCORPS_PROMPT_DIR "prompts"
#endif

namespace evocorps::engine {

using nlohmann::json;
namespace fs = std::filesystem;
using namespace detail;

// ----------------------------------------------------------- ablations ----

std::string Ablations::to_string() const {
  std::string out;
  auto add_name = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ",";
    out += name;
  };
  add_name(no_analyst, "analyst");
  add_name(no_strategist, "strategist");
  add_name(no_leader, "leader");
  add_name(no_amplifiers, "amplifiers");
  return out;
}

void Ablations::add(std::string_view name) {
  std::string n = to_lower(name);
  n.erase(std::remove_if(n.begin(), n.end(), [](char c) { return c == '_' || c == '-'; }),
          n.end());
  if (n.rfind("no", 0) == 0 && n != "no") n = n.substr(2);
  if (n == "analyst") {
    no_analyst = true;
  } else if (n == "strategist") {
    no_strategist = true;
  } else if (n == "leader") {
    no_leader = true;
  } else if (n == "amplifiers" || n == "amplifier") {
    no_amplifiers = true;
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown ablation '" + std::string(name) + "'");
  }
}

// -------------------------------------------------------------- config ----

namespace {

[[noreturn]] void bad_config(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kInvalidConfig, field + ": " + why);
}

}  // namespace

void validate(const ScenarioConfig& cfg) {
  const int c = static_cast<int>(cfg.case_id);
  if (c < 1 || c > 4) bad_config("case_id", "must be 1..4");
  if (cfg.horizon < 1) bad_config("horizon", "must be >= 1");
  if (cfg.population < 1) bad_config("population", "must be >= 1");
  if (!(cfg.lambda1 >= 0.0)) bad_config("lambda1", "must be >= 0");
  if (!(cfg.lambda2 >= 0.0)) bad_config("lambda2", "must be >= 0");
  if (!(cfg.eta >= 0.0)) bad_config("eta", "must be >= 0");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) bad_config("delta", "must lie in (0,1)");
  if (!(cfg.epsilon_mem > 0.0 && cfg.epsilon_mem < 1.0)) {
    bad_config("epsilon_mem", "must lie in (0,1)");
  }
  if (cfg.clarification_delay < 1) bad_config("clarification_delay", "must be >= 1");
  if (cfg.factcheck_delay < 0) bad_config("factcheck_delay", "must be >= 0");
  if (cfg.ablation.any() && cfg.case_id != CaseId::k4) {
    bad_config("ablation", "only allowed with case 4");
  }
  if (!(cfg.adversarial_fraction >= 0.0 && cfg.adversarial_fraction <= 1.0)) {
    bad_config("adversarial_fraction", "must lie in [0,1]");
  }
  for (int s : cfg.snapshot_steps) {
    if (s < 1) bad_config("snapshot_steps", "steps are 1-indexed");
  }
  if (cfg.feed.feed_size < 1) bad_config("feed.feed_size", "must be >= 1");
  if (cfg.feed.top_k < 1) bad_config("feed.top_k", "must be >= 1");
  if (cfg.feed.window < 1) bad_config("feed.window", "must be >= 1");
  if (cfg.attack.window < 1) bad_config("attack.window", "must be >= 1");
  if (cfg.attack.boost_likes < 0) bad_config("attack.boost_likes", "must be >= 0");
  for (const auto* p : {&cfg.profile_a, &cfg.profile_b}) {
    if (!(p->beta >= 0.0 && p->beta <= 1.0)) bad_config("profile.beta", "must lie in [0,1]");
    if (!(p->noise_sd >= 0.0)) bad_config("profile.noise_sd", "must be >= 0");
    if (!(p->activity_scale >= 0.0)) bad_config("profile.activity_scale", "must be >= 0");
  }
  if (!(cfg.lexicon_threshold >= 0.0 && cfg.lexicon_threshold <= 1.0)) {
    bad_config("lexicon_threshold", "must lie in [0,1]");
  }
  if (!(cfg.takedown_confidence >= 0.0 && cfg.takedown_confidence <= 1.0)) {
    bad_config("takedown_confidence", "must lie in [0,1]");
  }
  if (cfg.leader_candidates < 1) bad_config("leader_candidates", "must be >= 1");
  if (cfg.recall_top_k < 1) bad_config("recall_top_k", "must be >= 1");
  if (cfg.max_parallel < 1) bad_config("max_parallel", "must be >= 1");
  if (cfg.backend.kind == gateway::BackendKind::kRemote && cfg.backend.endpoint.empty()) {
    bad_config("backend.endpoint", "required for the remote backend");
  }
  if (cfg.backend.max_retries < 0) bad_config("backend.max_retries", "must be >= 0");
  if (cfg.backend.timeout_ms <= 0) bad_config("backend.timeout_ms", "must be > 0");
}

namespace {

template <typename T>
T take(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    bad_config(key, "wrong type");
  }
}

CaseId parse_case(const json& v) {
  int n = 0;
  if (v.is_number_integer()) {
    n = v.get<int>();
  } else if (v.is_string()) {
    std::string s = to_lower(v.get<std::string>());
    if (s.rfind("case", 0) == 0) s = s.substr(4);
    try {
      n = std::stoi(s);
    } catch (const std::exception&) {
      bad_config("case", "expected 1..4");
    }
  } else {
    bad_config("case", "expected 1..4");
  }
  if (n < 1 || n > 4) bad_config("case", "expected 1..4");
  return static_cast<CaseId>(n);
}

gateway::BackendKind parse_backend_kind(const std::string& s) {
  const std::string k = to_lower(s);
  if (k == "scripted") return gateway::BackendKind::kScripted;
  if (k == "remote") return gateway::BackendKind::kRemote;
  bad_config("backend", "expected scripted or remote");
}

void overlay_dynamics(social::UserDynamics& d, const json& j, const std::string& name) {
  if (!j.is_object()) bad_config(name, "expected an object");
  for (const auto& [k, v] : j.items()) {
    if (k == "beta") {
      d.beta = take<double>(v, "beta");
    } else if (k == "noise_sd") {
      d.noise_sd = take<double>(v, "noise_sd");
    } else if (k == "activity_scale") {
      d.activity_scale = take<double>(v, "activity_scale");
    } else {
      bad_config(name + "." + k, "unknown key");
    }
  }
}

}  // namespace

ScenarioConfig apply_config_json(ScenarioConfig c, const json& j) {
  if (!j.is_object()) bad_config("<config>", "expected a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (k == "case" || k == "case_id") {
      c.case_id = parse_case(v);
    } else if (k == "horizon" || k == "steps") {
      c.horizon = take<int>(v, "horizon");
    } else if (k == "population" || k == "population_size" || k == "users") {
      c.population = take<int>(v, "population");
    } else if (k == "seed") {
      c.seed = take<std::uint64_t>(v, "seed");
    } else if (k == "lambda1") {
      c.lambda1 = take<double>(v, "lambda1");
    } else if (k == "lambda2") {
      c.lambda2 = take<double>(v, "lambda2");
    } else if (k == "eta") {
      c.eta = take<double>(v, "eta");
    } else if (k == "delta") {
      c.delta = take<double>(v, "delta");
    } else if (k == "epsilon_mem") {
      c.epsilon_mem = take<double>(v, "epsilon_mem");
    } else if (k == "clarification_delay") {
      c.clarification_delay = take<int>(v, "clarification_delay");
    } else if (k == "factcheck_delay") {
      c.factcheck_delay = take<int>(v, "factcheck_delay");
    } else if (k == "ablation") {
      c.ablation = {};
      if (v.is_string()) {
        std::stringstream ss(v.get<std::string>());
        std::string part;
        while (std::getline(ss, part, ',')) {
          if (!part.empty()) c.ablation.add(part);
        }
      } else if (v.is_array()) {
        for (const auto& a : v) c.ablation.add(take<std::string>(a, "ablation"));
      } else {
        bad_config("ablation", "expected a string or a list");
      }
    } else if (k == "backend") {
      if (v.is_string()) {
        c.backend.kind = parse_backend_kind(v.get<std::string>());
      } else if (v.is_object()) {
        for (const auto& [bk, bv] : v.items()) {
          if (bk == "kind") {
            c.backend.kind = parse_backend_kind(take<std::string>(bv, "backend.kind"));
          } else if (bk == "endpoint") {
            c.backend.endpoint = take<std::string>(bv, "backend.endpoint");
          } else if (bk == "auth_env") {
            c.backend.auth_env = take<std::string>(bv, "backend.auth_env");
          } else if (bk == "timeout_ms") {
            c.backend.timeout_ms = take<int>(bv, "backend.timeout_ms");
          } else if (bk == "max_retries") {
            c.backend.max_retries = take<int>(bv, "backend.max_retries");
          } else if (bk == "backoff_base_ms") {
            c.backend.backoff_base_ms = take<int>(bv, "backend.backoff_base_ms");
          } else if (bk == "model") {
            c.backend.model = take<std::string>(bv, "backend.model");
          } else if (bk == "temperature") {
            c.backend.generation_temperature = take<double>(bv, "backend.temperature");
          } else {
            bad_config("backend." + bk, "unknown key");
          }
        }
      } else {
        bad_config("backend", "expected a string or an object");
      }
    } else if (k == "adversarial_fraction") {
      c.adversarial_fraction = take<double>(v, "adversarial_fraction");
    } else if (k == "snapshot_steps") {
      c.snapshot_steps = take<std::vector<int>>(v, "snapshot_steps");
    } else if (k == "feed") {
      if (!v.is_object()) bad_config("feed", "expected an object");
      for (const auto& [fk, fv] : v.items()) {
        if (fk == "feed_size") {
          c.feed.feed_size = take<std::size_t>(fv, "feed.feed_size");
        } else if (fk == "window") {
          c.feed.window = take<int>(fv, "feed.window");
        } else if (fk == "top_k") {
          c.feed.top_k = take<std::size_t>(fv, "feed.top_k");
        } else {
          bad_config("feed." + fk, "unknown key");
        }
      }
    } else if (k == "attack") {
      if (!v.is_object()) bad_config("attack", "expected an object");
      for (const auto& [ak, av] : v.items()) {
        if (ak == "identities") {
          c.attack.identities = take<std::size_t>(av, "attack.identities");
        } else if (ak == "window") {
          c.attack.window = take<int>(av, "attack.window");
        } else if (ak == "boost_likes") {
          c.attack.boost_likes = take<int>(av, "attack.boost_likes");
        } else if (ak == "boosted_per_round") {
          c.attack.boosted_per_round = take<std::size_t>(av, "attack.boosted_per_round");
        } else {
          bad_config("attack." + ak, "unknown key");
        }
      }
    } else if (k == "profile_a") {
      overlay_dynamics(c.profile_a, v, "profile_a");
    } else if (k == "profile_b") {
      overlay_dynamics(c.profile_b, v, "profile_b");
    } else if (k == "lexicon_threshold") {
      c.lexicon_threshold = take<double>(v, "lexicon_threshold");
    } else if (k == "takedown_confidence") {
      c.takedown_confidence = take<double>(v, "takedown_confidence");
    } else if (k == "leader_candidates") {
      c.leader_candidates = take<std::size_t>(v, "leader_candidates");
    } else if (k == "recall_top_k") {
      c.recall_top_k = take<std::size_t>(v, "recall_top_k");
    } else if (k == "max_parallel") {
      c.max_parallel = take<std::size_t>(v, "max_parallel");
    } else if (k == "probe_users") {
      c.probe_users = take<std::size_t>(v, "probe_users");
    } else if (k == "toxicity_endpoint") {
      c.toxicity_endpoint = take<std::string>(v, "toxicity_endpoint");
    } else if (k == "toxicity_key_env") {
      c.toxicity_key_env = take<std::string>(v, "toxicity_key_env");
    } else if (k == "data_dir") {
      c.data_dir = take<std::string>(v, "data_dir");
    } else if (k == "prompt_dir") {
      c.prompt_dir = take<std::string>(v, "prompt_dir");
    } else if (k == "memory_import") {
      c.memory_import = take<std::string>(v, "memory_import");
    } else if (k == "memory_export") {
      c.memory_export = take<std::string>(v, "memory_export");
    } else {
      bad_config(k, "unknown key");
    }
  }
  return c;
}

ScenarioConfig load_config_file(const fs::path& path, ScenarioConfig base) {
  json j;
  try {
    j = json::parse(read_file(path), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  return apply_config_json(std::move(base), j);
}

std::string case_label(const ScenarioConfig& cfg) {
  std::string out = "case" + std::to_string(static_cast<int>(cfg.case_id));
  if (cfg.ablation.no_analyst) out += "_no_analyst";
  if (cfg.ablation.no_strategist) out += "_no_strategist";
  if (cfg.ablation.no_leader) out += "_no_leader";
  if (cfg.ablation.no_amplifiers) out += "_no_amplifiers";
  return out;
}

fs::path default_data_dir() {
  if (const char* env = std::getenv("EVOCORPS_DATA_DIR"); env && *env) return env;
  return EVOCORPS_DATA_DIR;
}

fs::path default_prompt_dir() {
  if (const char* env = std::getenv("EVOCORPS_PROMPT_DIR"); env && *env) return env;
  return EVOCORPS_PROMPT_DIR;
}

// ----------------------------------------------------------------- log ----

json EventRecord::to_json() const {
  return {{"step", step}, {"phase", phase}, {"seq", seq},
          {"actor", actor}, {"kind", kind}, {"payload", payload}};
}

EventRecord EventRecord::from_json(const json& j) {
  EventRecord e;
  try {
    e.step = j.at("step").get<int>();
    e.phase = j.at("phase").get<int>();
    e.seq = j.at("seq").get<std::uint64_t>();
    e.actor = j.at("actor").get<std::string>();
    e.kind = j.at("kind").get<std::string>();
    e.payload = j.value("payload", json::object());
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kParse, std::string("event record: ") + ex.what());
  }
  return e;
}

std::string RunLog::to_jsonl() const {
  std::string out;
  for (const auto& e : events) {
    out += e.to_json().dump();
    out += '\n';
  }
  return out;
}

RunLog RunLog::from_jsonl(const std::string& text) {
  RunLog log;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      log.events.push_back(EventRecord::from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, "log line " + std::to_string(n) + ": " + e.what());
    }
  }
  if (!log.events.empty()) {
    const auto& last = log.events.back();
    log.complete = last.kind == "run_end";
    if (last.kind == "run_abort") log.error = last.payload.value("error", "");
  }
  return log;
}

RunLog RunLog::load(const fs::path& path) { return from_jsonl(read_file(path)); }

// ----------------------------------------------------- serialization ----

json comment_to_json(const Comment& c) {
  return {{"comment_id", c.id},         {"post_id", c.post_id},
          {"author_id", c.author_id},   {"agent_type", std::string(to_string(c.agent_type))},
          {"time_step", c.time_step},   {"text", c.text},
          {"likes", c.likes},           {"stance", c.stance},
          {"sentiment", c.sentiment},   {"toxicity", c.toxicity},
          {"evidence", c.evidence}};
}

// --------------------------------------------------------------- world ----

namespace {

json world_json(const WorldState& w) {
  json posts = json::array();
  for (const auto& p : w.posts) posts.push_back(post_json(p));
  json comments = json::array();
  for (const auto& c : w.comments) comments.push_back(comment_to_json(c));
  json users = json::array();
  for (const auto& u : w.users) users.push_back(user_json(u));
  json kb = json::array();
  for (const auto& e : w.kb_items) kb.push_back(evidence_json(e));
  json memory = json::array();
  for (const auto& t : w.memory) memory.push_back(tuple_json(t));
  return {{"step", w.step}, {"posts", posts},   {"comments", comments}, {"users", users},
          {"kb", kb},       {"memory", memory}, {"state", state_json(w.state)}};
}

}  // namespace

std::string world_digest(const WorldState& world) { return sha256_hex(world_json(world).dump()); }

std::string replay_digest(const RunLog& log) {
  if (!log.complete) {
    throw Error(ErrorCode::kIncompleteLog,
                log.error.empty() ? "log is incomplete" : "log is incomplete: " + log.error);
  }
  return sha256_hex(log.to_jsonl());
}

WorldState replay(const RunLog& log) {
  WorldState w;
  std::map<std::string, std::size_t> users;
  auto post_at = [&](const std::string& id) -> Post& {
    auto idx = post_index_of(id);
    if (!idx || *idx >= w.posts.size()) {
      throw Error(ErrorCode::kNotFound, "replay: unknown post " + id);
    }
    return w.posts[*idx];
  };
  auto comment_at = [&](const std::string& id) -> Comment& {
    auto idx = comment_index_of(id);
    if (!idx || *idx >= w.comments.size()) {
      throw Error(ErrorCode::kNotFound, "replay: unknown comment " + id);
    }
    return w.comments[*idx];
  };
  try {
    for (const auto& ev : log.events) {
      const auto& p = ev.payload;
      const std::string& k = ev.kind;
      if (k == "user_init") {
        users[p.at("user_id").get<std::string>()] = w.users.size();
        w.users.push_back(user_from_json(p));
      } else if (k == "kb_seed") {
        w.kb_items.push_back(evidence_from_json(p.at("item")));
      } else if (k == "kb_admit") {
        if (p.at("admitted").get<bool>()) w.kb_items.push_back(evidence_from_json(p.at("item")));
      } else if (k == "kb_reinforce") {
        for (const auto& it : p.at("items")) {
          const auto id = it.at("id").get<std::string>();
          for (auto& e : w.kb_items) {
            if (e.id == id) e.persuasiveness = it.at("p").get<double>();
          }
        }
      } else if (k == "memory_seed") {
        w.memory.push_back(tuple_from_json(p.at("tuple")));
      } else if (k == "memory_record") {
        if (p.at("retained").get<bool>()) w.memory.push_back(tuple_from_json(p.at("tuple")));
      } else if (k == "post_publish") {
        Post post;
        post.id = p.at("post_id").get<std::string>();
        post.news_id = p.at("news_id").get<std::string>();
        post.source_label = p.at("source_label").get<std::string>();
        post.text = p.at("text").get<std::string>();
        post.polarity = parse_polarity(p.at("polarity").get<std::string>());
        post.publish_step = p.at("publish_step").get<int>();
        post.topic = p.at("topic").get<TokenSet>();
        if (p.contains("origin_post_id") && p["origin_post_id"].is_string()) {
          post.origin_post_id = p["origin_post_id"].get<std::string>();
        }
        w.posts.push_back(std::move(post));
      } else if (k == "comment") {
        Comment c = comment_from_json(p);
        post_at(c.post_id).comments.push_back(w.comments.size());
        w.comments.push_back(std::move(c));
      } else if (k == "boost" || k == "like_comment") {
        comment_at(p.at("comment_id").get<std::string>()).likes += p.at("delta").get<int>();
      } else if (k == "like_post") {
        post_at(p.at("post_id").get<std::string>()).likes += 1;
      } else if (k == "share_post") {
        post_at(p.at("post_id").get<std::string>()).shares += 1;
      } else if (k == "user_update") {
        auto& u = w.users.at(users.at(p.at("user_id").get<std::string>()));
        u.opinion = p.at("opinion").get<double>();
        u.mood = p.at("mood").get<double>();
      } else if (k == "user_memory") {
        auto& u = w.users.at(users.at(p.at("user_id").get<std::string>()));
        u.memory.push_back(p.at("entry").get<std::string>());
      } else if (k == "verdict") {
        Verdict v;
        v.post_id = p.at("post_id").get<std::string>();
        v.label = parse_verdict_label(p.at("label").get<std::string>());
        v.confidence = p.at("confidence").get<double>();
        v.explanation = p.value("explanation", "");
        v.sources = p.value("sources", std::vector<std::string>{});
        v.issued_step = p.at("issued_step").get<int>();
        post_at(v.post_id).verdict = v;
      } else if (k == "takedown") {
        post_at(p.at("post_id").get<std::string>()).removed_from_step =
            p.at("removed_from_step").get<int>();
      } else if (k == "state") {
        w.state = {p.at("v").get<double>(), p.at("e").get<double>(), p.at("step").get<int>()};
      } else if (k == "step_end") {
        w.step = ev.step;
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("replay: ") + e.what());
  } catch (const std::out_of_range&) {
    throw Error(ErrorCode::kNotFound, "replay: event refers to an unknown user");
  }
  return w;
}

json ProbeRecord::to_json() const {
  return {{"step", step},           {"user_id", user_id}, {"stance", stance},
          {"sentiment", sentiment}, {"content", content}, {"rationale", rationale}};
}

}  // namespace evocorps::engine

#include "evocorps/gateway.hpp"

#include <httplib.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <regex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "evocorps/error.hpp"
#include "evocorps/rng.hpp"
#include "evocorps/text.hpp"

namespace evocorps::gateway {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<RoleTag, std::string_view>, 15> kRoleNames = {{
    {RoleTag::kOrdinaryUser, "ordinary_user"},
    {RoleTag::kMalicious, "malicious"},
    {RoleTag::kAnalyst, "analyst"},
    {RoleTag::kStrategist, "strategist"},
    {RoleTag::kLeaderCreate, "leader_create"},
    {RoleTag::kUscEvaluate, "usc_evaluate"},
    {RoleTag::kAmplifier, "amplifier"},
    {RoleTag::kFactcheck, "factcheck"},
    {RoleTag::kGraderSentiment, "grader_sentiment"},
    {RoleTag::kGraderExtremity, "grader_extremity"},
    {RoleTag::kGraderAqs, "grader_aqs"},
    {RoleTag::kGraderFallacy, "grader_fallacy"},
    {RoleTag::kGraderEvidence, "grader_evidence"},
    {RoleTag::kProbe, "probe"},
    {RoleTag::kReflection, "reflection"},
}};

}  // namespace

std::string_view to_string(RoleTag r) {
  for (const auto& [tag, name] : kRoleNames) {
    if (tag == r) return name;
  }
  return "unknown";
}

RoleTag parse_role_tag(std::string_view s) {
  for (const auto& [tag, name] : kRoleNames) {
    if (name == s) return tag;
  }
  throw Error(ErrorCode::kParse, "unknown role tag '" + std::string(s) + "'");
}

bool is_grader(RoleTag r) {
  switch (r) {
    case RoleTag::kGraderSentiment:
    case RoleTag::kGraderExtremity:
    case RoleTag::kGraderAqs:
    case RoleTag::kGraderFallacy:
    case RoleTag::kGraderEvidence:
      return true;
    default:
      return false;
  }
}

void validate(const GenerationRequest& request) {
  if (is_grader(request.role) && request.temperature != 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("grader request '") + std::string(to_string(request.role)) +
                    "' must use temperature 0");
  }
  if (request.temperature < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be non-negative");
  }
  if (request.max_tokens <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_tokens must be positive");
  }
}

// ------------------------------------------------------------ scripted ----

namespace {

std::string hint(const GenerationRequest& r, const std::string& key,
                 const std::string& fallback = "") {
  auto it = r.hints.find(key);
  return it == r.hints.end() ? fallback : it->second;
}

double hint_num(const GenerationRequest& r, const std::string& key, double fallback) {
  auto it = r.hints.find(key);
  if (it == r.hints.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    return fallback;
  }
}

std::uint64_t request_hash(const GenerationRequest& r) {
  std::string key(to_string(r.role));
  key += '\x1f';
  for (const auto& [k, v] : r.hints) {
    key += k;
    key += '=';
    key += v;
    key += '\x1f';
  }
  key += r.system_text;
  key += '\x1f';
  key += r.user_text;
  return splitmix64(fnv1a64(key));
}

template <std::size_t N>
std::string_view pick(const std::array<std::string_view, N>& bank, std::uint64_t& h) {
  const auto v = bank[h % N];
  h = splitmix64(h);
  return v;
}

constexpr std::array<std::string_view, 4> kNegativeOpeners = {
    "Honestly this makes me furious.", "I'm so tired of hearing this.",
    "This is depressing to read.", "Ugh, here we go again."};
constexpr std::array<std::string_view, 4> kNeutralOpeners = {
    "Not sure what to think about this yet.", "Interesting, but I want more context.",
    "Reading the thread before I decide.", "Hmm, there are two sides to this."};
constexpr std::array<std::string_view, 4> kPositiveOpeners = {
    "Glad to see a calmer take on this.", "This actually gives me some hope.",
    "Good to see people talking it through.", "Appreciate the clear summary here."};
constexpr std::array<std::string_view, 3> kStrongStance = {
    "This is completely unacceptable.", "There is no way I'm buying the official line.",
    "Somebody has to answer for this."};
constexpr std::array<std::string_view, 3> kMildStance = {
    "I think the details matter more than the headline.",
    "Let's wait for the full picture before judging.",
    "Probably less dramatic than people are making it."};
constexpr std::array<std::string_view, 4> kToxicInserts = {
    "These idiots never learn.", "What a disgusting joke.",
    "Corrupt liars, all of them.", "Pathetic."};
constexpr std::array<std::string_view, 5> kMaliciousLines = {
    "WAKE UP people, they are LYING to you about {topic}! Corrupt traitors, all of them!",
    "Disgusting coverup on {topic}. These criminals think we're sheep. RAGE is the only sane response!",
    "Pathetic propaganda about {topic}. Anyone defending this is a puppet. Shameful!",
    "They BETRAYED us on {topic} and the sheep still clap. Evil liars, every one!",
    "Total fraud around {topic}. I HATE how these scum get away with it. Who's next?"};
constexpr std::array<std::string_view, 4> kAmplifierOpeners = {
    "I get why people are upset, but", "Speaking as someone who checks sources,",
    "From my corner of the community,", "Quick reality check, friends:"};
constexpr std::array<std::string_view, 3> kAngles = {
    "evidence-first explainer", "shared-values appeal", "practical next steps"};

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::string scripted_ordinary(const GenerationRequest& r, std::uint64_t h) {
  const double stance = hint_num(r, "stance", 0.0);
  const double sentiment = hint_num(r, "sentiment", 0.5);
  const double toxicity = hint_num(r, "toxicity", 0.1);
  const std::string topic = hint(r, "topic", "this story");
  std::string out;
  if (sentiment < 0.35) {
    out = pick(kNegativeOpeners, h);
  } else if (sentiment < 0.65) {
    out = pick(kNeutralOpeners, h);
  } else {
    out = pick(kPositiveOpeners, h);
  }
  out += " About " + topic + ": ";
  out += std::abs(stance) > 0.6 ? pick(kStrongStance, h) : pick(kMildStance, h);
  if (toxicity > 0.5) {
    out += " ";
    out += pick(kToxicInserts, h);
  }
  return out;
}

std::string scripted_amplifier(const GenerationRequest& r, std::uint64_t h) {
  std::string out(pick(kAmplifierOpeners, h));
  out += " on " + hint(r, "topic", "this topic") + " the fuller picture matters.";
  const std::string arg = hint(r, "argument");
  if (!arg.empty()) out += " " + arg;
  if (hint(r, "evidence") == "1") {
    const std::string source = hint(r, "source", "the public health agency");
    out += " According to the " + source + " report, the numbers do not support the panic.";
  }
  out += " Let's keep it civil and look at what is actually known.";
  return out;
}

std::string scripted_leader(const GenerationRequest& r) {
  std::string out = "[" + hint(r, "angle", std::string(kAngles[0])) + "] ";
  out += "Before sharing anything about " + hint(r, "topic", "this story") +
         ", it is worth slowing down. ";
  const std::string args = hint(r, "arguments");
  if (!args.empty()) {
    out += "Here is what the evidence says: " + args + " ";
  } else {
    out += "The claim going around leaves out important context. ";
  }
  out += "Disagreement is fine; let's argue about facts instead of each other.";
  return out;
}

std::string scripted_probe(const GenerationRequest& r) {
  const double stance = hint_num(r, "stance", 0.0);
  const double sentiment = hint_num(r, "sentiment", 0.5);
  std::string content;
  if (stance < -0.5) {
    content = "This confirms my worst fears and I don't trust the people in charge.";
  } else if (stance > 0.5) {
    content = "I think the story is overblown and the response has been reasonable.";
  } else {
    content = "I'm skeptical of the framing and would like to see the evidence.";
  }
  std::string reason =
      sentiment < 0.35
          ? "The angry comments I keep seeing have worn me down."
          : (sentiment > 0.65 ? "Recent calm, sourced replies made me feel steadier."
                              : "The discussion has been mixed, so I'm holding back.");
  json j = {{"user_id", hint(r, "user_id")}, {"content", content}, {"reason", reason}};
  return j.dump();
}

}  // namespace

GenerationResponse ScriptedBackend::complete(const GenerationRequest& request) {
  std::uint64_t h = request_hash(request);
  GenerationResponse resp;
  resp.finish_reason = "stop";
  switch (request.role) {
    case RoleTag::kOrdinaryUser:
      resp.text = scripted_ordinary(request, h);
      break;
    case RoleTag::kMalicious:
      resp.text = replace_all(std::string(pick(kMaliciousLines, h)), "{topic}",
                              hint(request, "topic", "this"));
      break;
    case RoleTag::kAmplifier:
      resp.text = scripted_amplifier(request, h);
      break;
    case RoleTag::kLeaderCreate:
      resp.text = scripted_leader(request);
      break;
    case RoleTag::kAnalyst:
      resp.text = json{{"core_viewpoint", hint(request, "topic", "the post")}}.dump();
      break;
    case RoleTag::kStrategist:
      resp.text = json{{"core_counter_argument", hint(request, "argument")},
                       {"leader_instruction",
                        {{"tone", "calm and factual"},
                         {"style", "explainer"},
                         {"target_audience", "undecided readers"},
                         {"content_length", "120-200 words"}}}}
                      .dump();
      break;
    case RoleTag::kProbe:
      resp.text = scripted_probe(request);
      break;
    case RoleTag::kReflection:
      resp.text = hint(request, "summary",
                       "I have no notable patterns to reflect on yet.");
      break;
    default:
      resp.text = hint(request, "reply", std::string(to_string(request.role)) + ": ok");
      break;
  }
  return resp;
}

// -------------------------------------------------------------- remote ----

RemoteBackend::RemoteBackend(BackendConfig config) : config_(std::move(config)) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, kUrl)) {
    throw Error(ErrorCode::kInvalidConfig,
                "remote backend endpoint must be an http(s) URL: '" + config_.endpoint + "'");
  }
  base_url_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/v1/chat/completions";
}

GenerationResponse RemoteBackend::complete(const GenerationRequest& request) {
  json body = {{"model", request.model_tag.empty() ? config_.model : request.model_tag},
               {"temperature", request.temperature},
               {"max_tokens", request.max_tokens},
               {"messages", json::array()}};
  if (!request.system_text.empty()) {
    body["messages"].push_back({{"role", "system"}, {"content", request.system_text}});
  }
  body["messages"].push_back({{"role", "user"}, {"content", request.user_text}});
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (const char* token = std::getenv(config_.auth_env.c_str()); token && *token) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  const auto role = std::string(to_string(request.role));
  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(config_.backoff_base_ms * (1LL << (attempt - 1))));
    }
    httplib::Client client(base_url_);
    const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw BackendError(role, "HTTP " + std::to_string(res->status) + " from " +
                                   base_url_ + path_ + ": " + res->body.substr(0, 512));
    }
    try {
      const json j = json::parse(res->body);
      const auto& choice = j.at("choices").at(0);
      GenerationResponse out;
      out.text = choice.at("message").at("content").get<std::string>();
      out.finish_reason = choice.value("finish_reason", "stop");
      return out;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, "malformed chat-completion response for '" + role +
                                         "' (" + e.what() + "): " + res->body.substr(0, 1024));
    }
  }
  throw BackendError(role, "request '" + role + "' failed after " +
                               std::to_string(config_.max_retries + 1) +
                               " attempts: " + last_error);
}

// ------------------------------------------------------------- gateway ----

Gateway::Gateway(std::shared_ptr<Backend> backend) : backend_(std::move(backend)) {
  if (!backend_) throw Error(ErrorCode::kInvalidArgument, "gateway requires a backend");
}

std::shared_ptr<Backend> make_backend(const BackendConfig& config) {
  if (config.kind == BackendKind::kScripted) return std::make_shared<ScriptedBackend>();
  if (config.endpoint.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "remote backend requires an endpoint");
  }
  return std::make_shared<RemoteBackend>(config);
}

Gateway Gateway::from_config(const BackendConfig& config) { return Gateway(make_backend(config)); }

GenerationResponse Gateway::complete(const GenerationRequest& request) {
  validate(request);
  requests_.fetch_add(1);
  return backend_->complete(request);
}

std::vector<BatchEntry> Gateway::complete_batch(const std::vector<GenerationRequest>& requests,
                                                std::size_t max_parallel) {
  if (requests.empty()) throw Error(ErrorCode::kInvalidArgument, "empty batch");
  std::vector<BatchEntry> out(requests.size());
  auto run_one = [&](std::size_t i) {
    try {
      out[i].response = complete(requests[i]);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  };
  if (backend_->scripted() || max_parallel <= 1) {
    for (std::size_t i = 0; i < requests.size(); ++i) run_one(i);
    return out;
  }
  for (std::size_t start = 0; start < requests.size(); start += max_parallel) {
    std::vector<std::future<void>> wave;
    const std::size_t end = std::min(requests.size(), start + max_parallel);
    for (std::size_t i = start; i < end; ++i) {
      wave.push_back(std::async(std::launch::async, run_one, i));
    }
    for (auto& f : wave) f.get();
  }
  return out;
}

std::string Gateway::memory_reflection(const std::string& persona,
                                       const std::vector<std::string>& memories) {
  if (memories.empty()) return "I have no notable patterns to reflect on yet.";
  GenerationRequest req;
  req.role = RoleTag::kReflection;
  std::string memory_text;
  for (const auto& m : memories) memory_text += "\n- " + m;
  req.user_text =
      "Based on your recent experiences as a social media user with:\nBackground: " +
      persona + "\nRecent memories and experiences:" + memory_text +
      "\nReflect on these experiences and generate insights about:\n"
      "1. Patterns in your interactions\n2. Changes in your relationships\n"
      "3. Evolution of your interests\n4. Potential biases or preferences you've developed\n"
      "5. Goals or objectives you might want to pursue\n"
      "Provide a thoughtful reflection that could guide your future behavior. Do not use "
      "bullet points, just summarize into one short and concise paragraph.";
  req.hints["summary"] = "Looking back at my last " + std::to_string(memories.size()) +
                         " interactions, I notice I mostly react to the loudest threads; "
                         "most recently: " + memories.back() +
                         ". I want to check sources before I respond next time.";
  return complete(req).text;
}

// ------------------------------------------------------------- prompts ----

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
  PromptLibrary lib;
  for (const auto& [tag, name] : kRoleNames) {
    const auto path = dir / (std::string(name) + ".txt");
    if (!std::filesystem::exists(path)) continue;
    const std::string raw = read_file(path);
    Rendered r;
    const std::string sys_marker = "=== system ===";
    const std::string user_marker = "=== user ===";
    const auto s = raw.find(sys_marker);
    const auto u = raw.find(user_marker);
    auto trim = [](std::string x) {
      const auto b = x.find_first_not_of("\r\n");
      const auto e = x.find_last_not_of(" \r\n");
      return b == std::string::npos ? std::string{} : x.substr(b, e - b + 1);
    };
    if (u == std::string::npos) {
      r.user = trim(raw);
    } else {
      if (s != std::string::npos && s < u) {
        r.system = trim(raw.substr(s + sys_marker.size(), u - s - sys_marker.size()));
      }
      r.user = trim(raw.substr(u + user_marker.size()));
    }
    lib.templates_[tag] = std::move(r);
  }
  return lib;
}

std::string PromptLibrary::substitute(std::string_view tmpl,
                                      const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        const std::string key(tmpl.substr(i + 1, close - i - 1));
        auto it = vars.find(key);
        if (it != vars.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i]);
    ++i;
  }
  return out;
}

PromptLibrary::Rendered PromptLibrary::render(
    RoleTag role, const std::map<std::string, std::string>& vars) const {
  auto it = templates_.find(role);
  if (it == templates_.end()) return {};
  return {substitute(it->second.system, vars), substitute(it->second.user, vars)};
}

}  // namespace evocorps::gateway

#include "evocorps/metrics.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <regex>
#include <unordered_map>

#include <json.hpp>

#include "evocorps/error.hpp"

namespace evocorps::metrics {

using nlohmann::json;

double reward(const MeanFieldState& prev, const MeanFieldState& next,
              const RewardConfig& cfg) {
  if (cfg.lambda1 < 0.0 || cfg.lambda2 < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "reward weights must be non-negative");
  }
  return -cfg.lambda1 * (next.v - prev.v) + cfg.lambda2 * (next.e - prev.e);
}

RewardSeries reward_series(const std::vector<double>& rewards) {
  RewardSeries s;
  s.reward = rewards;
  double sum = 0.0;
  for (std::size_t k = 0; k < rewards.size(); ++k) {
    sum += rewards[k];
    s.cumulative.push_back(sum);
    s.average.push_back(sum / static_cast<double>(k + 1));
  }
  return s;
}

namespace {

std::string clean_label(std::string_view raw) {
  std::size_t b = 0, e = raw.size();
  auto junk = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '"' || c == '\'' ||
           c == '.' || c == '`';
  };
  while (b < e && junk(raw[b])) ++b;
  while (e > b && junk(raw[e - 1])) --e;
  return to_lower(raw.substr(b, e - b));
}

std::optional<std::size_t> find_class(const std::array<std::string_view, 5>& labels,
                                      std::string_view raw) {
  const std::string want = clean_label(raw);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (to_lower(labels[i]) == want) return i;
  }
  return std::nullopt;
}

// First balanced {...} or [...] block in a reply, tolerant of code fences.
std::optional<json> extract_json(std::string_view reply) {
  const auto open = reply.find_first_of("{[");
  if (open == std::string_view::npos) return std::nullopt;
  const char close_ch = reply[open] == '{' ? '}' : ']';
  const auto close = reply.find_last_of(close_ch);
  if (close == std::string_view::npos || close < open) return std::nullopt;
  try {
    return json::parse(reply.substr(open, close - open + 1));
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

}  // namespace

std::optional<std::size_t> sentiment_class(std::string_view label) {
  return find_class(kSentimentLabels, label);
}

std::optional<std::size_t> extremity_class(std::string_view label) {
  return find_class(kExtremityLabels, label);
}

std::optional<double> sentiment_score(std::string_view label) {
  auto k = sentiment_class(label);
  if (!k) return std::nullopt;
  return kLabelScores[*k];
}

std::optional<double> extremity_score(std::string_view label) {
  auto k = extremity_class(label);
  if (!k) return std::nullopt;
  return kLabelScores[*k];
}

bool is_fallacy_type(std::string_view type) {
  return std::find(kFallacyTypes.begin(), kFallacyTypes.end(), type) != kFallacyTypes.end();
}

std::size_t quantize5(double x) {
  const double c = std::clamp(x, 0.0, 1.0);
  return static_cast<std::size_t>(std::lround(4.0 * c));
}

double label_entropy(const std::array<std::size_t, 5>& counts) {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  if (n == 0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(n);
    h -= p * std::log(p);
  }
  return h;
}

double lexicon_toxicity(std::string_view text, const Lexicon& lexicon) {
  std::size_t tokens = 0;
  // tokenize() dedups, so count raw alphanumeric runs here
  bool in = false;
  for (char ch : text) {
    const bool alnum = std::isalnum(static_cast<unsigned char>(ch)) != 0;
    if (alnum && !in) ++tokens;
    in = alnum;
  }
  if (tokens == 0) return 0.0;
  const double frac = static_cast<double>(lexicon.hits(text)) / static_cast<double>(tokens);
  return std::clamp(4.0 * frac, 0.0, 1.0);
}

double aqs_rubric(const Comment& c) {
  const double v = 0.3 + 0.3 * (c.evidence ? 1.0 : 0.0) + 0.2 * (1.0 - std::abs(c.stance)) +
                   0.2 * c.sentiment * (1.0 - c.toxicity);
  return std::clamp(v, 0.0, 1.0);
}

FallacyResult fallacy_rule(const Comment& c) {
  FallacyResult r;
  r.fallacious = c.toxicity > 0.5 || (std::abs(c.stance) > 0.8 && !c.evidence);
  if (r.fallacious) r.type = std::string(kFallacyTypes[6]);
  return r;
}

bool evidence_in_text(std::string_view text) {
  static const std::regex kUrl(R"((https?://\S+)|(\bwww\.[A-Za-z0-9-]+\.[A-Za-z]{2,}))");
  static const std::regex kNamedOrg(
      R"(\b(CDC|WHO|FDA|NIH|EPA|BLS|CBO|GAO|IPCC|NOAA|NASA|OECD|IMF|UN|UNICEF|Reuters|AP|BBC|NPR|Pew|Gallup|Census Bureau|Associated Press|World Bank|Federal Reserve)\b)");
  static const std::regex kAttribution(
      R"(\b([Aa]ccording to|[Dd]ata from|[Rr]eported by|[Pp]ublished by|[Cc]ited by)\s+(the\s+)?[A-Z][A-Za-z&.-]+)");
  static const std::regex kNamedReport(
      R"(\b[A-Z][A-Za-z&-]+\s+((19|20)\d{2}\s+)?(report|study|survey|dataset|audit|review)\b)");
  static const std::regex kBill(R"(\b(H\.\s?R\.|S\.|Bill No\.|Public Law)\s?\d+(-\d+)?\b)");
  static const std::regex kCase(R"(\b[A-Z][a-z]+ v\. [A-Z][a-z]+|\bNo\. \d{2}-\d+)");
  static const std::regex kQuote(
      R"(("[^"]{3,}"\s*,?\s*(said|says|stated|wrote|told)\s+[A-Z][a-z]+)|([A-Z][a-z]+ [A-Z][a-z]+\s+(said|stated|told)[^"]*"[^"]{3,}"))");
  const std::string s(text);
  for (const auto* re : {&kUrl, &kNamedOrg, &kAttribution, &kNamedReport, &kBill, &kCase, &kQuote}) {
    if (std::regex_search(s, *re)) return true;
  }
  return false;
}

// ----------------------------------------------------------- scripted ----

ScriptedGrader::ScriptedGrader(ToxicityMode mode, Lexicon lexicon)
    : mode_(mode), lexicon_(std::move(lexicon)) {
  if (mode_ == ToxicityMode::kRemote) {
    throw Error(ErrorCode::kInvalidConfig, "scripted grader cannot use a remote toxicity scorer");
  }
}

CommentGrades ScriptedGrader::grade(const Comment& c, const std::string&) {
  CommentGrades g;
  g.sentiment = kLabelScores[quantize5(c.sentiment)];
  g.extremity_class = quantize5(std::abs(c.stance));
  g.extremity = kLabelScores[*g.extremity_class];
  g.toxicity = mode_ == ToxicityMode::kLexiconProxy ? lexicon_toxicity(c.text, lexicon_)
                                                     : std::clamp(c.toxicity, 0.0, 1.0);
  g.aqs = aqs_rubric(c);
  g.fallacious = fallacy_rule(c).fallacious;
  g.evidence = c.evidence;
  return g;
}

// ------------------------------------------------------------- remote ----

ToxicityClient::ToxicityClient(std::string endpoint, std::string key_env, int timeout_ms)
    : key_env_(std::move(key_env)), timeout_ms_(timeout_ms) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(endpoint, m, kUrl)) {
    throw Error(ErrorCode::kInvalidConfig, "toxicity endpoint must be an http(s) URL: '" +
                                               endpoint + "'");
  }
  base_url_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/v1alpha1/comments:analyze";
}

std::optional<double> ToxicityClient::score(const std::string& text) const {
  json body = {{"comment", {{"text", text}}},
               {"languages", {"en"}},
               {"requestedAttributes", {{"TOXICITY", json::object()}}}};
  std::string path = path_;
  if (const char* key = std::getenv(key_env_.c_str()); key && *key) {
    path += (path.find('?') == std::string::npos ? "?key=" : "&key=") + std::string(key);
  }
  httplib::Client client(base_url_);
  const auto timeout = std::chrono::milliseconds(timeout_ms_);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res || res->status != 200) return std::nullopt;
  try {
    const double v = json::parse(res->body)
                         .at("attributeScores")
                         .at("TOXICITY")
                         .at("summaryScore")
                         .at("value")
                         .get<double>();
    if (v < 0.0 || v > 1.0) return std::nullopt;
    return v;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

std::optional<bool> parse_fallacy_reply(std::string_view reply, std::string* type) {
  auto j = extract_json(reply);
  if (!j) return std::nullopt;
  json items = j->is_array() ? *j : json::array({*j});
  if (items.empty()) return std::nullopt;
  bool any = false;
  std::string first_type;
  try {
    for (const auto& it : items) {
      const auto flag = it.at("fallacious").get<std::string>();
      if (flag == "Yes") {
        const auto t = it.value("fallacy_type", std::string{});
        if (!is_fallacy_type(t)) return std::nullopt;
        if (!any) first_type = t;
        any = true;
      } else if (flag != "No") {
        return std::nullopt;
      }
    }
  } catch (const json::exception&) {
    return std::nullopt;
  }
  if (type) *type = first_type;
  return any;
}

std::optional<double> parse_aqs_reply(std::string_view reply) {
  auto j = extract_json(reply);
  if (!j || !j->is_object() || !j->contains("score")) return std::nullopt;
  const auto& s = (*j)["score"];
  if (!s.is_number()) return std::nullopt;
  const double v = s.get<double>();
  if (v < 0.0 || v > 1.0) return std::nullopt;
  return v;
}

std::optional<bool> parse_evidence_reply(std::string_view reply) {
  auto j = extract_json(reply);
  if (!j || !j->is_object() || !j->contains("evidence_present")) return std::nullopt;
  const auto& v = (*j)["evidence_present"];
  if (!v.is_number_integer()) return std::nullopt;
  const auto n = v.get<int>();
  if (n != 0 && n != 1) return std::nullopt;
  return n == 1;
}

RemoteGrader::RemoteGrader(gateway::Gateway& gw, gateway::PromptLibrary prompts,
                           Lexicon lexicon, std::optional<ToxicityClient> toxicity)
    : gw_(gw),
      prompts_(std::move(prompts)),
      lexicon_(std::move(lexicon)),
      toxicity_(std::move(toxicity)) {
  using gateway::RoleTag;
  for (auto role : {RoleTag::kGraderSentiment, RoleTag::kGraderExtremity, RoleTag::kGraderAqs,
                    RoleTag::kGraderFallacy, RoleTag::kGraderEvidence}) {
    if (!prompts_.has(role)) {
      throw Error(ErrorCode::kInvalidConfig, "missing prompt template for '" +
                                                 std::string(gateway::to_string(role)) + "'");
    }
  }
}

std::string RemoteGrader::ask(gateway::RoleTag role,
                              const std::map<std::string, std::string>& vars) {
  const auto rendered = prompts_.render(role, vars);
  gateway::GenerationRequest req;
  req.role = role;
  req.system_text = rendered.system;
  req.user_text = rendered.user;
  req.temperature = 0.0;
  req.max_tokens = 256;
  return gw_.complete(req).text;
}

namespace {

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    cur.push_back(ch);
    if (ch == '.' || ch == '!' || ch == '?') {
      const auto b = cur.find_first_not_of(' ');
      if (b != std::string::npos) out.push_back(cur.substr(b));
      cur.clear();
    }
  }
  const auto b = cur.find_first_not_of(' ');
  if (b != std::string::npos) out.push_back(cur.substr(b));
  return out;
}

}  // namespace

CommentGrades RemoteGrader::grade(const Comment& c, const std::string& topic) {
  using gateway::RoleTag;
  CommentGrades g;
  if (c.text.empty()) return g;  // empty texts are skipped
  const std::map<std::string, std::string> vars = {
      {"TEXT", c.text},
      {"TOPIC", topic},
      {"ARGUMENT", c.text},
      {"STATEMENT", c.text},
      {"LIST_OF_SENTENCES", json(split_sentences(c.text)).dump()}};
  // A failed call leaves that metric missing for this comment.
  auto guarded = [&](RoleTag role) -> std::optional<std::string> {
    try {
      return ask(role, vars);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  if (auto r = guarded(RoleTag::kGraderSentiment)) g.sentiment = sentiment_score(*r);
  if (auto r = guarded(RoleTag::kGraderExtremity)) {
    g.extremity_class = extremity_class(*r);
    if (g.extremity_class) g.extremity = kLabelScores[*g.extremity_class];
  }
  if (auto r = guarded(RoleTag::kGraderAqs)) g.aqs = parse_aqs_reply(*r);
  if (auto r = guarded(RoleTag::kGraderFallacy)) g.fallacious = parse_fallacy_reply(*r);
  if (auto r = guarded(RoleTag::kGraderEvidence)) g.evidence = parse_evidence_reply(*r);
  g.toxicity = toxicity_ ? toxicity_->score(c.text)
                         : std::optional<double>(lexicon_toxicity(c.text, lexicon_));
  return g;
}

// ----------------------------------------------------------- snapshot ----

bool eligible(const Comment& c, std::size_t post_comment_count, int t) {
  return c.agent_type == AgentType::kNormal && c.time_step <= t &&
         post_comment_count > kMinPostComments;
}

MetricSnapshot snapshot(const std::vector<Comment>& comments,
                        const std::vector<CommentGrades>& grades, int t) {
  if (grades.size() != comments.size()) {
    throw Error(ErrorCode::kInvalidArgument, "grades must align with comments");
  }
  std::unordered_map<std::string, std::size_t> per_post;
  for (const auto& c : comments) ++per_post[c.post_id];

  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
    void add(std::optional<double> v) {
      if (v) {
        sum += *v;
        ++n;
      }
    }
    std::optional<double> pct() const {
      if (n == 0) return std::nullopt;
      return 100.0 * sum / static_cast<double>(n);
    }
  };
  Acc sent, tox, ext, aqs, fal, evi;
  MetricSnapshot s;
  s.t = t;
  for (std::size_t i = 0; i < comments.size(); ++i) {
    const auto& c = comments[i];
    if (!eligible(c, per_post[c.post_id], t)) continue;
    const auto& g = grades[i];
    ++s.n_comments;
    sent.add(g.sentiment);
    tox.add(g.toxicity);
    ext.add(g.extremity);
    aqs.add(g.aqs);
    if (g.fallacious) fal.add(*g.fallacious ? 1.0 : 0.0);
    if (g.evidence) evi.add(*g.evidence ? 1.0 : 0.0);
    if (g.extremity_class) ++s.extremity_histogram[*g.extremity_class];
  }
  s.sentiment = sent.pct();
  s.toxicity = tox.pct();
  s.extremity = ext.pct();
  s.aqs = aqs.pct();
  s.fallacy = fal.pct();
  s.evidence = evi.pct();
  if (ext.n > 0) s.extremity_entropy = label_entropy(s.extremity_histogram);
  return s;
}

std::string snapshot_csv_header() { return "case,t,metric,value,n_comments"; }

std::string snapshot_csv_rows(const std::string& case_label, const MetricSnapshot& s) {
  const std::pair<const char*, const std::optional<double>*> cols[] = {
      {"sentiment", &s.sentiment}, {"toxicity", &s.toxicity},
      {"extremity", &s.extremity}, {"aqs", &s.aqs},
      {"fallacy", &s.fallacy},     {"evidence", &s.evidence},
      {"extremity_entropy", &s.extremity_entropy}};
  std::string out;
  for (const auto& [name, v] : cols) {
    char buf[32] = "";
    if (*v) std::snprintf(buf, sizeof buf, "%.4f", **v);
    out += case_label + "," + std::to_string(s.t) + "," + name + "," + buf + "," +
           std::to_string(s.n_comments) + "\n";
  }
  return out;
}

}  // namespace evocorps::metrics

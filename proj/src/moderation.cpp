#include "evocorps/moderation.hpp"

#include <algorithm>
#include <regex>

#include <json.hpp>

#include "evocorps/error.hpp"

namespace evocorps::moderation {

using nlohmann::json;

std::vector<std::size_t> schedule_checks(const std::vector<Post>& posts, int step,
                                         const ModerationParams& params) {
  std::vector<std::size_t> due;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    const auto& p = posts[i];
    if (!p.verdict && p.publish_step + params.delay <= step) due.push_back(i);
  }
  return due;
}

Verdict adjudicate(const Post& post, int step, const ModerationParams& params, Rng& rng) {
  Verdict v;
  v.post_id = post.id;
  v.issued_step = step;
  switch (post.polarity) {
    case Polarity::kAdversarial:
      v.label = VerdictLabel::kFalse;
      v.confidence = rng.uniform(params.false_conf_lo, params.false_conf_hi);
      v.explanation = "Claim contradicts the verified record from " + post.source_label + ".";
      v.sources = {post.source_label};
      break;
    case Polarity::kClarification:
      v.label = VerdictLabel::kTrue;
      v.confidence = 0.95;
      v.explanation = "Consistent with the published correction.";
      v.sources = {post.source_label};
      break;
    case Polarity::kBenign:
      v.label = VerdictLabel::kUnverified;
      v.confidence = 0.5;
      v.explanation = "No independent confirmation available.";
      break;
  }
  return v;
}

Verdict adjudicate_remote(const Post& post, int step, gateway::Gateway& gw,
                          const gateway::PromptLibrary& prompts) {
  const auto rendered = prompts.render(
      gateway::RoleTag::kFactcheck,
      {{"post_content", post.text},
       {"likes", std::to_string(post.likes)},
       {"shares", std::to_string(post.shares)},
       {"comments", std::to_string(post.comments.size())},
       {"community_notes", ""}});
  gateway::GenerationRequest req;
  req.role = gateway::RoleTag::kFactcheck;
  req.system_text = rendered.system;
  req.user_text = rendered.user;
  req.temperature = 0.0;
  req.requester = "factchecker";
  const std::string reply = gw.complete(req).text;

  Verdict v;
  v.post_id = post.id;
  v.issued_step = step;
  bool have_label = false, have_conf = false;
  const auto open = reply.find('{');
  const auto close = reply.rfind('}');
  if (open != std::string::npos && close != std::string::npos && close > open) {
    try {
      const json j = json::parse(reply.substr(open, close - open + 1));
      const auto label = j.contains("verdict") ? j.at("verdict") : j.at("label");
      v.label = parse_verdict_label(to_lower(label.get<std::string>()));
      have_label = true;
      v.confidence = j.at("confidence").get<double>();
      have_conf = true;
      v.explanation = j.value("explanation", std::string{});
      if (j.contains("sources") && j["sources"].is_array()) {
        for (const auto& s : j["sources"]) {
          if (s.is_string()) v.sources.push_back(s.get<std::string>());
        }
      }
    } catch (const std::exception&) {
      // fall through to line parsing
    }
  }
  if (!have_label) {
    static const std::regex kLabel(R"(verdict\W{0,5}(true|false|unverified))", std::regex::icase);
    std::smatch m;
    if (std::regex_search(reply, m, kLabel)) {
      v.label = parse_verdict_label(to_lower(m[1].str()));
      have_label = true;
    }
  }
  if (!have_conf) {
    static const std::regex kConf(R"(confidence[^0-9]{0,20}([01](\.[0-9]+)?))", std::regex::icase);
    std::smatch m;
    if (std::regex_search(reply, m, kConf)) {
      v.confidence = std::stod(m[1].str());
      have_conf = true;
    }
  }
  if (!have_label || !have_conf || v.confidence < 0.0 || v.confidence > 1.0) {
    throw Error(ErrorCode::kParse, "unreadable fact-check verdict for " + post.id + ": " +
                                       reply.substr(0, 512));
  }
  if (v.explanation.empty()) v.explanation = reply.substr(0, 512);
  return v;
}

bool is_takedown(const Verdict& v, const ModerationParams& params) {
  return v.label == VerdictLabel::kFalse && v.confidence > params.takedown_confidence;
}

bool enforce(Post& post, const Verdict& verdict, const ModerationParams& params) {
  post.verdict = verdict;
  if (is_takedown(verdict, params)) {
    post.removed_from_step = verdict.issued_step + 1;
    return true;
  }
  return false;
}

}  // namespace evocorps::moderation

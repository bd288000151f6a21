#pragma once

// Domain records shared by every module: news items, posts, comments,
// fact-check verdicts and the mean-field control state.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evocorps/text.hpp"

namespace evocorps {

enum class AgentType { kNormal, kMalicious, kAmplifier, kLeader };

std::string_view to_string(AgentType t);
AgentType parse_agent_type(std::string_view s);

enum class Polarity { kBenign, kAdversarial, kClarification };

std::string_view to_string(Polarity p);
Polarity parse_polarity(std::string_view s);

struct NewsItem {
  std::string id;
  std::string source_label;
  std::string text;
  Polarity polarity = Polarity::kBenign;
  int publish_step = 1;
  std::optional<std::string> origin_id;  // set for clarifications
};

struct Comment {
  std::string id;
  std::string post_id;
  std::string author_id;
  AgentType agent_type = AgentType::kNormal;
  int time_step = 1;  // 1-indexed round of creation
  std::string text;
  double stance = 0.0;     // [-1, 1]
  double sentiment = 0.5;  // [0, 1]
  double toxicity = 0.0;   // [0, 1]
  bool evidence = false;
  int likes = 0;
};

enum class VerdictLabel { kTrue, kFalse, kUnverified };

std::string_view to_string(VerdictLabel l);
VerdictLabel parse_verdict_label(std::string_view s);

struct Verdict {
  std::string post_id;
  VerdictLabel label = VerdictLabel::kUnverified;
  double confidence = 0.0;
  std::string explanation;
  std::vector<std::string> sources;
  int issued_step = 0;
};

struct Post {
  std::string id;
  std::string news_id;
  std::string source_label;
  std::string text;
  Polarity polarity = Polarity::kBenign;
  int publish_step = 1;
  std::optional<std::string> origin_post_id;
  TokenSet topic;
  int likes = 0;
  int shares = 0;
  std::vector<std::size_t> comments;  // indices into the world comment list
  std::optional<int> removed_from_step;
  std::optional<Verdict> verdict;

  bool visible_at(int step) const {
    return publish_step <= step &&
           (!removed_from_step || step < *removed_from_step);
  }
};

// Control state s_t = (v_t, e_t): like-weighted mean extremity and sentiment.
struct MeanFieldState {
  double v = 0.0;
  double e = 0.0;
  int step = 0;
};

// Zero-padded identifiers keep lexical order equal to creation order.
std::string post_id_for(std::size_t index);
std::string comment_id_for(std::size_t index);
std::optional<std::size_t> comment_index_of(std::string_view id);
std::optional<std::size_t> post_index_of(std::string_view id);

}  // namespace evocorps

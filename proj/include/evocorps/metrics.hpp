#pragma once

// Round reward, per-comment graders and snapshot aggregation over the
// ordinary-user subset of a run.

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evocorps/gateway.hpp"
#include "evocorps/text.hpp"
#include "evocorps/types.hpp"

namespace evocorps::metrics {

// ------------------------------------------------------------- reward ----

struct RewardConfig {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
};

// -lambda1 * (v_next - v_prev) + lambda2 * (e_next - e_prev)
double reward(const MeanFieldState& prev, const MeanFieldState& next,
              const RewardConfig& cfg = {});

struct RewardSeries {
  std::vector<double> reward;
  std::vector<double> cumulative;
  std::vector<double> average;
};

RewardSeries reward_series(const std::vector<double>& rewards);

// --------------------------------------------------------- label maps ----

inline constexpr std::array<std::string_view, 5> kSentimentLabels = {
    "Very Negative", "Negative", "Neutral", "Positive", "Very Positive"};
inline constexpr std::array<std::string_view, 5> kExtremityLabels = {
    "Very Moderate", "Moderate", "Neutral", "Extreme", "Very Extreme"};
inline constexpr std::array<double, 5> kLabelScores = {0.0, 0.25, 0.5, 0.75, 1.0};

inline constexpr std::array<std::string_view, 13> kFallacyTypes = {
    "Ad Hominem",
    "Ad Populum",
    "False Dilemma / Black-and-White Fallacy",
    "False Cause",
    "Circular Reasoning",
    "Deductive Fallacy / Fallacy of Logic",
    "Appeal to Emotion / Emotional Language",
    "Equivocation",
    "Fallacy of Extension / Extension Fallacy",
    "Faulty Generalization / Hasty Generalization",
    "Intentional Fallacy",
    "Fallacy of Credibility / Irrelevant Authority",
    "Fallacy of Relevance / Red Herring",
};

// Grader replies are matched after trimming whitespace, quotes and a
// trailing period, case-insensitively. Anything else is missing.
std::optional<double> sentiment_score(std::string_view label);
std::optional<double> extremity_score(std::string_view label);
std::optional<std::size_t> sentiment_class(std::string_view label);
std::optional<std::size_t> extremity_class(std::string_view label);
bool is_fallacy_type(std::string_view type);

// Five-class quantization of a scalar in [0, 1]: round(4x).
std::size_t quantize5(double x);

// Shannon entropy (natural log) of a label histogram; 0 for an empty one.
double label_entropy(const std::array<std::size_t, 5>& counts);

// ------------------------------------------------------------- graders ----

// max(0, min(1, 4 * hits / tokens)); text without tokens scores 0.
double lexicon_toxicity(std::string_view text, const Lexicon& lexicon);

// clamp(0.3 + 0.3*evidence + 0.2*(1-|stance|) + 0.2*sentiment*(1-toxicity))
double aqs_rubric(const Comment& c);

struct FallacyResult {
  bool fallacious = false;
  std::string type;  // empty when not fallacious
};

// Fallacious iff toxicity > 0.5 or (|stance| > 0.8 and no evidence).
FallacyResult fallacy_rule(const Comment& c);

// URL, named checkable source, bill/case identifier or quoted named speaker.
bool evidence_in_text(std::string_view text);

struct CommentGrades {
  std::optional<double> sentiment;
  std::optional<double> toxicity;
  std::optional<double> extremity;
  std::optional<std::size_t> extremity_class;
  std::optional<double> aqs;
  std::optional<bool> fallacious;
  std::optional<bool> evidence;
};

enum class ToxicityMode { kAttribute, kLexiconProxy, kRemote };

class Grader {
 public:
  virtual ~Grader() = default;
  virtual CommentGrades grade(const Comment& c, const std::string& topic) = 0;
};

// Reads comment attributes: sentiment and |stance| are quantized to the five
// classes and mapped through the label tables; toxicity is passed through
// (or lexicon-proxied), evidence is the stored flag.
class ScriptedGrader final : public Grader {
 public:
  explicit ScriptedGrader(ToxicityMode mode = ToxicityMode::kAttribute,
                          Lexicon lexicon = {});
  CommentGrades grade(const Comment& c, const std::string& topic) override;

 private:
  ToxicityMode mode_;
  Lexicon lexicon_;
};

// Perspective-compatible comment analyzer. Returns nullopt on any failure.
class ToxicityClient {
 public:
  ToxicityClient(std::string endpoint, std::string key_env, int timeout_ms = 30000);
  std::optional<double> score(const std::string& text) const;

 private:
  std::string base_url_;
  std::string path_;
  std::string key_env_;
  int timeout_ms_;
};

// Parsers for JSON grader replies; nullopt when malformed or off-list.
std::optional<bool> parse_fallacy_reply(std::string_view reply, std::string* type = nullptr);
std::optional<double> parse_aqs_reply(std::string_view reply);
std::optional<bool> parse_evidence_reply(std::string_view reply);

// Text graders through the gateway (temperature 0). Toxicity goes to the
// remote scorer when one is configured, else to the lexicon proxy.
class RemoteGrader final : public Grader {
 public:
  RemoteGrader(gateway::Gateway& gw, gateway::PromptLibrary prompts, Lexicon lexicon,
               std::optional<ToxicityClient> toxicity = std::nullopt);
  CommentGrades grade(const Comment& c, const std::string& topic) override;

 private:
  std::string ask(gateway::RoleTag role, const std::map<std::string, std::string>& vars);

  gateway::Gateway& gw_;
  gateway::PromptLibrary prompts_;
  Lexicon lexicon_;
  std::optional<ToxicityClient> toxicity_;
};

// ------------------------------------------------------------ snapshot ----

struct MetricSnapshot {
  int t = 0;
  std::optional<double> sentiment;
  std::optional<double> toxicity;
  std::optional<double> extremity;
  std::optional<double> aqs;
  std::optional<double> fallacy;
  std::optional<double> evidence;
  std::size_t n_comments = 0;
  std::optional<double> extremity_entropy;
  std::array<std::size_t, 5> extremity_histogram{};
};

inline constexpr std::size_t kMinPostComments = 50;

// Eligible: agent_type normal, time_step <= t, post has more than 50
// comments in total.
bool eligible(const Comment& c, std::size_t post_comment_count, int t);

// `grades` is aligned with `comments`; per-post counts are taken over the
// whole list. Each metric averages the eligible comments where it is present.
MetricSnapshot snapshot(const std::vector<Comment>& comments,
                        const std::vector<CommentGrades>& grades, int t);

std::string snapshot_csv_header();
// One line per metric (newline-terminated); missing values leave the cell empty.
std::string snapshot_csv_rows(const std::string& case_label, const MetricSnapshot& s);

}  // namespace evocorps::metrics

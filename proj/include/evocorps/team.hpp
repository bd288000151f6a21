#pragma once

// Intervention pipeline: Analyst -> Strategist -> Leader -> Amplifiers, plus
// the post-round feedback and the ablation substitutes.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "evocorps/cognition.hpp"
#include "evocorps/gateway.hpp"
#include "evocorps/metrics.hpp"
#include "evocorps/rng.hpp"
#include "evocorps/types.hpp"

namespace evocorps::team {

// --------------------------------------------------------------- state ----

// Like-weighted |stance| and sentiment over `comments`. An empty list
// carries `prev` forward with the new step.
MeanFieldState estimate_state(const std::vector<const Comment*>& comments,
                              const MeanFieldState& prev, int step);

// ------------------------------------------------------------- analyst ----

struct LeveledComment {
  int likes = 0;
  int level = 0;  // 0..4
};

struct WeightedExtremism {
  double score = 0.0;
  int level = 0;
  std::vector<double> contributions;  // level_j * w_j, aligned with input
};

// score = sum level_j * (likes_j + 1) / sum(likes + 1); level is the score
// rounded half-up and clamped to [0, 4]. Empty input gives (0, 0).
WeightedExtremism weighted_extremism(const std::vector<LeveledComment>& comments);

// round(4 |stance|)
int stance_level(double stance);

enum class Heat { kLow, kModerate, kHigh, kViral };

std::string_view to_string(Heat h);
Heat heat_for_likes(int total_likes);
double heat_multiplier(Heat h);

struct BreakdownEntry {
  std::string comment_id;
  int likes = 0;
  int level = 0;
  double weighted_contribution = 0.0;
};

struct AnalysisReport {
  std::string post_id;
  std::string core_viewpoint;
  TokenSet topic;
  int extremism_level = 0;
  double weighted_score = 0.0;
  std::vector<BreakdownEntry> breakdown;
  Heat engagement = Heat::kLow;
  double sentiment_estimate = 0.5;
  bool high_liked_extreme = false;    // a level >= 3 comment in the top 3 by likes
  bool amplification_risk = false;    // a malicious comment in the top 3 by likes
  bool requires_intervention = false;
  int urgency = 1;
};

// max(level, 3 * [sentiment < 0.35]) clamped to [1, 4]
int urgency_for(int extremism_level, double sentiment);

// extremism >= 2 or sentiment < 0.35 or a high-liked extreme comment
bool trigger(const AnalysisReport& report);

// Scripted analysis of one post over its visible comments.
AnalysisReport analyze(const Post& post, const std::vector<const Comment*>& comments);

// Stand-in when the Analyst is ablated: alert iff the fraction of comments
// with at least one lexicon hit exceeds `threshold`.
struct LexiconAlert {
  bool alert = false;
  double fraction = 0.0;
  std::size_t hits = 0;
  std::size_t total = 0;
};

LexiconAlert lexicon_alert(const std::vector<const Comment*>& comments,
                           const Lexicon& lexicon, double threshold = 0.3);

// Fixed report used with a lexicon alert: level 2, sentiment 0.5, urgency 2.
AnalysisReport heuristic_report(const Post& post, const std::vector<const Comment*>& comments);

// ---------------------------------------------------------- strategist ----

enum class Timing { kImmediate, kStaggered, kProgressive };

std::string_view to_string(Timing t);
Timing parse_timing(std::string_view s);

inline constexpr std::array<std::string_view, 4> kAmplifierRoles = {
    "balanced_moderates", "technical_experts", "community_voices", "fact_checkers"};

struct LeaderInstruction {
  std::string tone = "calm and factual";
  std::string style = "evidence-first explainer";
  std::vector<std::string> key_points;
  std::string target_audience = "undecided readers";
  std::string content_length = "120-200 words";
};

struct StrategyPlan {
  std::string strategy_id;
  std::string post_id;
  int total_agents = 0;
  std::array<int, 4> role_distribution{};
  Timing timing = Timing::kImmediate;
  std::string core_counter_argument;
  std::vector<std::string> argument_ids;  // selected evidence, best first
  LeaderInstruction leader_instruction;
  std::size_t recalled = 0;
};

int base_agents(int extremism_level);

// Even split in priority order; the first roles take the remainder.
std::array<int, 4> split_roles(int total);

// Majority timing among recalled tuples whose reward is at least the median
// reward of the recalled set; ties go to the earlier enumerator.
std::optional<Timing> memory_timing(const std::vector<cognition::MemoryTuple>& recalled);

StrategyPlan plan(const AnalysisReport& report, const cognition::KnowledgeBase& kb,
                  const std::vector<cognition::MemoryTuple>& recalled, int step);

// Predefined rule used when the Strategist is ablated.
StrategyPlan fixed_plan(const AnalysisReport& report, const cognition::KnowledgeBase& kb,
                        int step);

std::string plan_digest(const StrategyPlan& plan);

// -------------------------------------------------------------- leader ----

inline constexpr std::array<std::string_view, 3> kCreationAngles = {
    "evidence-first explainer", "shared-values appeal", "practical next steps"};

struct LeaderCandidate {
  std::string text;
  std::string angle;
  double stance = 0.0;
};

struct Evaluation {
  std::array<int, 5> scores{};  // persuasiveness, logic, readability, relevance, impact
  int total = 0;
};

struct LeaderOutput {
  std::vector<LeaderCandidate> candidates;
  std::vector<Evaluation> evaluations;
  std::size_t chosen_index = 0;

  const LeaderCandidate& chosen() const { return candidates.at(chosen_index); }
};

// Deterministic five-dimension rubric, each score in [1, 5].
Evaluation scripted_rubric(const LeaderCandidate& candidate,
                           const std::vector<const cognition::EvidenceItem*>& args,
                           const TokenSet& core_viewpoint_tokens);

// argmax of totals, lowest index on ties.
std::size_t choose(const std::vector<Evaluation>& evaluations);

// Parses "Persuasiveness: X points" style replies; nullopt when any of the
// five dimensions is missing or outside [1, 5].
std::optional<Evaluation> parse_usc_evaluation(const std::string& reply);

// Generates n candidates (one per angle, cycling) and selects one. Scripted
// backends score with the rubric; remote ones use the evaluation prompt and
// fall back to the rubric for an unparseable reply.
LeaderOutput generate_and_select(gateway::Gateway& gw, const gateway::PromptLibrary& prompts,
                                 const StrategyPlan& plan, const AnalysisReport& report,
                                 const std::vector<const cognition::EvidenceItem*>& args,
                                 std::size_t n = 3);

// ----------------------------------------------------------- amplifier ----

struct AmplifierDraft {
  std::size_t persona_index = 0;
  std::string role;
  int step_offset = 0;
  double stance = 0.0;
  double sentiment = 0.75;
  double toxicity = 0.05;
  bool evidence = false;
  std::string argument_id;  // cited item when evidence is set
};

struct AmplifierBatch {
  std::vector<AmplifierDraft> drafts;
  bool pool_exhausted = false;
};

// Step offsets for `total` comments: immediate all 0; staggered
// ceil(n/2) at 0 and the rest at 1; progressive three near-equal parts,
// larger parts first.
std::vector<int> timing_offsets(Timing timing, int total);

AmplifierBatch amplify(const StrategyPlan& plan, double counter_stance, std::size_t pool_size,
                       bool args_attached, Rng& rng);

// ------------------------------------------------------------ feedback ----

struct FeedbackResult {
  double reward = 0.0;
  bool retained = false;
};

// reward from the two states, reinforcement of the plan's arguments and a
// gated memory record.
FeedbackResult feedback(const MeanFieldState& prev, const MeanFieldState& next,
                        const StrategyPlan& plan, const std::string& leader_digest,
                        const cognition::ObservationRef& observation,
                        cognition::KnowledgeBase& kb, cognition::ActionOutcomeMemory& memory,
                        const metrics::RewardConfig& reward_cfg, double epsilon_mem, int step);

}  // namespace evocorps::team

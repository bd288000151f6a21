#pragma once

// Simulation kernel: configuration, world state, the seven-phase round,
// the replayable event log and output writers.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "evocorps/cognition.hpp"
#include "evocorps/gateway.hpp"
#include "evocorps/metrics.hpp"
#include "evocorps/moderation.hpp"
#include "evocorps/social.hpp"
#include "evocorps/team.hpp"
#include "evocorps/types.hpp"

namespace evocorps::engine {

enum class CaseId { k1 = 1, k2 = 2, k3 = 3, k4 = 4 };

struct Ablations {
  bool no_analyst = false;
  bool no_strategist = false;
  bool no_leader = false;
  bool no_amplifiers = false;

  bool any() const { return no_analyst || no_strategist || no_leader || no_amplifiers; }
  // "analyst,leader" style list; empty when none.
  std::string to_string() const;
  // Accepts analyst|strategist|leader|amplifiers (optionally prefixed "no_").
  void add(std::string_view name);
};

struct ScenarioConfig {
  CaseId case_id = CaseId::k4;
  int horizon = 30;
  int population = 50;
  std::uint64_t seed = 42;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double eta = 0.01;
  double delta = 0.2;
  double epsilon_mem = 0.05;
  int clarification_delay = 4;
  int factcheck_delay = 3;
  Ablations ablation;
  gateway::BackendConfig backend;

  double adversarial_fraction = 0.25;
  std::vector<int> snapshot_steps = {1, 5, 10, 20, 30};
  social::FeedParams feed;
  social::AttackParams attack;
  social::UserDynamics profile_a{0.5, 0.02, 1.0};
  social::UserDynamics profile_b{0.35, 0.03, 0.85};
  double lexicon_threshold = 0.3;
  double takedown_confidence = 0.9;
  std::size_t leader_candidates = 3;
  std::size_t recall_top_k = 5;
  std::size_t max_parallel = 4;
  std::size_t probe_users = 3;

  // Remote toxicity scorer for grading; empty endpoint uses the lexicon proxy.
  std::string toxicity_endpoint;
  std::string toxicity_key_env = "PERSPECTIVE_API_KEY";

  std::filesystem::path data_dir;
  std::filesystem::path prompt_dir;
  std::filesystem::path memory_import;  // optional
  std::filesystem::path memory_export;  // optional
};

// Throws kInvalidConfig naming the offending field.
void validate(const ScenarioConfig& cfg);

// Overlays keys from a JSON object onto `base`. Unknown keys are rejected.
ScenarioConfig apply_config_json(ScenarioConfig base, const nlohmann::json& j);
ScenarioConfig load_config_file(const std::filesystem::path& path, ScenarioConfig base = {});

std::string case_label(const ScenarioConfig& cfg);

// Directories baked in at build time; overridable through the config.
std::filesystem::path default_data_dir();
std::filesystem::path default_prompt_dir();

// ------------------------------------------------------------------ log ----

enum Phase : int {
  kInit = 0,
  kNews = 1,
  kAdversary = 2,
  kTeam = 3,
  kUsers = 4,
  kModeration = 5,
  kFeedback = 6,
  kSnapshot = 7,
};

struct EventRecord {
  int step = 0;
  int phase = 0;
  std::uint64_t seq = 0;
  std::string actor;
  std::string kind;
  nlohmann::json payload;

  nlohmann::json to_json() const;
  static EventRecord from_json(const nlohmann::json& j);
};

struct RunLog {
  std::vector<EventRecord> events;
  bool complete = false;
  std::string error;  // set when the run aborted

  // One canonical JSON object per line (sorted keys). A complete log ends
  // with a run_end event.
  std::string to_jsonl() const;
  static RunLog from_jsonl(const std::string& text);
  static RunLog load(const std::filesystem::path& path);
};

// --------------------------------------------------------------- world ----

struct WorldState {
  int step = 0;
  std::vector<Post> posts;
  std::vector<Comment> comments;
  std::vector<social::OrdinaryUser> users;
  std::vector<cognition::EvidenceItem> kb_items;
  std::vector<cognition::MemoryTuple> memory;
  MeanFieldState state;
};

// SHA-256 over a canonical serialization of the world.
std::string world_digest(const WorldState& world);

// SHA-256 over the canonical JSONL of a complete log; kIncompleteLog
// otherwise.
std::string replay_digest(const RunLog& log);

// Rebuilds the world by folding the log's events.
WorldState replay(const RunLog& log);

struct ProbeRecord {
  int step = 0;
  std::string user_id;
  double stance = 0.0;
  double sentiment = 0.5;
  std::string content;
  std::string rationale;

  nlohmann::json to_json() const;
};

struct RunResult {
  RunLog log;
  WorldState world;
  std::vector<double> rewards;          // one per completed round
  std::vector<MeanFieldState> states;   // baseline first, then one per round
  std::vector<ProbeRecord> probes;
};

// ----------------------------------------------------------- simulation ----

class Simulation {
 public:
  // Loads data, validates and emits the step-0 events. Throws on invalid
  // configuration or data.
  explicit Simulation(ScenarioConfig cfg);
  Simulation(ScenarioConfig cfg, gateway::Gateway& gateway);
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // Runs one round (all seven phases). Throws when the horizon is reached.
  void step();
  bool done() const;
  int current_step() const;

  // Runs the remaining rounds. A backend failure stops the run and leaves
  // the log flagged incomplete instead of throwing.
  RunResult run();

  // Reaction of one user to the fixed stimulus. Mutates nothing.
  ProbeRecord probe_user(const std::string& user_id) const;
  std::vector<std::string> tracked_users() const;

  const WorldState& world() const;
  const RunLog& log() const;
  const ScenarioConfig& config() const;
  const cognition::KnowledgeBase* knowledge_base() const;
  std::uint64_t gateway_requests() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

RunResult run_scenario(const ScenarioConfig& cfg);

// ------------------------------------------------------------- outputs ----

// Snapshot metrics over the final comment list. Remote backends grade text
// through the gateway; scripted ones read comment attributes.
std::vector<metrics::MetricSnapshot> compute_snapshots(const ScenarioConfig& cfg,
                                                       const WorldState& world,
                                                       gateway::Gateway* gateway = nullptr);

// run_log.jsonl, data/scenario_<case>/post-<id>/comments.jsonl,
// metrics.csv, reward.csv, probes.jsonl and the optional memory export.
void write_outputs(const ScenarioConfig& cfg, const RunResult& result,
                   const std::vector<metrics::MetricSnapshot>& snapshots,
                   const std::filesystem::path& out_dir);

nlohmann::json comment_to_json(const Comment& c);

}  // namespace evocorps::engine

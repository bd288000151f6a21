#pragma once

// Text generation and grading behind one interface: a deterministic scripted
// backend and a chat-completion HTTP client with retries.

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evocorps::gateway {

enum class RoleTag {
  kOrdinaryUser,
  kMalicious,
  kAnalyst,
  kStrategist,
  kLeaderCreate,
  kUscEvaluate,
  kAmplifier,
  kFactcheck,
  kGraderSentiment,
  kGraderExtremity,
  kGraderAqs,
  kGraderFallacy,
  kGraderEvidence,
  kProbe,
  kReflection,
};

std::string_view to_string(RoleTag r);
RoleTag parse_role_tag(std::string_view s);
bool is_grader(RoleTag r);

struct GenerationRequest {
  RoleTag role = RoleTag::kOrdinaryUser;
  std::string system_text;
  std::string user_text;
  double temperature = 0.7;
  int max_tokens = 512;
  std::string model_tag;
  // Structured inputs for the scripted backend. Never sent over the wire.
  std::map<std::string, std::string> hints;
  std::string requester;  // agent id, used for logging
};

struct GenerationResponse {
  std::string text;
  std::string finish_reason;
};

// Throws kInvalidArgument: grader roles require temperature 0, max_tokens
// must be positive, temperature must be non-negative.
void validate(const GenerationRequest& request);

enum class BackendKind { kScripted, kRemote };

struct BackendConfig {
  BackendKind kind = BackendKind::kScripted;
  std::string endpoint;  // http(s)://host[:port]/path
  std::string auth_env = "EVOCORPS_API_KEY";
  int timeout_ms = 30000;
  int max_retries = 3;
  int backoff_base_ms = 500;
  std::string model = "gpt-4o-mini";
  double generation_temperature = 0.7;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual GenerationResponse complete(const GenerationRequest& request) = 0;
  virtual bool scripted() const { return false; }
};

// Pure function of the request: template expansion keyed by role and a hash
// of the request contents.
class ScriptedBackend final : public Backend {
 public:
  GenerationResponse complete(const GenerationRequest& request) override;
  bool scripted() const override { return true; }
};

// One chat-completion POST per attempt. Timeouts, connection failures, 429
// and 5xx are retried with exponential backoff (base * 2^attempt); other
// statuses fail at once.
class RemoteBackend final : public Backend {
 public:
  explicit RemoteBackend(BackendConfig config);
  GenerationResponse complete(const GenerationRequest& request) override;

 private:
  BackendConfig config_;
  std::string base_url_;
  std::string path_;
};

std::shared_ptr<Backend> make_backend(const BackendConfig& config);

struct BatchEntry {
  std::optional<GenerationResponse> response;
  std::string error;

  bool ok() const { return response.has_value(); }
};

class Gateway {
 public:
  explicit Gateway(std::shared_ptr<Backend> backend);
  static Gateway from_config(const BackendConfig& config);

  // Validates, then forwards to the backend. Thread-safe.
  GenerationResponse complete(const GenerationRequest& request);

  // Runs up to `max_parallel` requests at a time; entries come back in
  // request order and a failure is confined to its own entry.
  std::vector<BatchEntry> complete_batch(const std::vector<GenerationRequest>& requests,
                                         std::size_t max_parallel = 4);

  // One-paragraph reflection over a user's recent memories. The scripted
  // backend yields a fixed template; no memories yields a fixed sentence.
  std::string memory_reflection(const std::string& persona,
                                const std::vector<std::string>& memories);

  std::uint64_t request_count() const { return requests_.load(); }
  bool scripted() const { return backend_->scripted(); }

 private:
  std::shared_ptr<Backend> backend_;
  std::atomic<std::uint64_t> requests_{0};
};

// Prompt templates: prompts/<role_tag>.txt, split into an optional
// "=== system ===" section and a "=== user ===" section. Placeholders are
// written {name}; unknown placeholders are left untouched.
class PromptLibrary {
 public:
  PromptLibrary() = default;
  static PromptLibrary load(const std::filesystem::path& dir);

  bool has(RoleTag role) const { return templates_.contains(role); }

  struct Rendered {
    std::string system;
    std::string user;
  };
  Rendered render(RoleTag role, const std::map<std::string, std::string>& vars) const;

  static std::string substitute(std::string_view tmpl,
                                const std::map<std::string, std::string>& vars);

 private:
  std::map<RoleTag, Rendered> templates_;
};

}  // namespace evocorps::gateway

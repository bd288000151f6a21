#pragma once

// Environment actors: the news stream with adversarial injection, like-ranked
// feeds, the ordinary-user population and the coordinated malicious swarm.

#include <filesystem>
#include <string>
#include <vector>

#include "evocorps/rng.hpp"
#include "evocorps/types.hpp"

namespace evocorps::social {

// ---------------------------------------------------------------- news ----

struct NewsRecord {
  std::string id;
  std::string source_label;
  std::string text;
  int step = 1;
  std::string tag;  // "benign" records are never selected for injection
};

std::vector<NewsRecord> load_news_jsonl(const std::filesystem::path& path);

std::string adversarial_variant_text(const NewsRecord& record);
std::string clarification_text(const NewsRecord& record);

// Eligible records (tag != "benign"), ordered by (step, id), are selected at
// evenly spaced positions: index i is chosen iff
// ceil((i+1)*fraction) > ceil(i*fraction). The first eligible record is always
// chosen when fraction > 0. Each chosen record publishes as an Adversarial
// variant at its step and a Clarification at step + clarification_delay; the
// rest publish as Benign. Items past the horizon are kept in the schedule and
// simply never released.
std::vector<NewsItem> build_stream(const std::vector<NewsRecord>& records,
                                   double adversarial_fraction,
                                   int clarification_delay);

// ---------------------------------------------------------------- feed ----

// Likes descending, then newer time_step, then id; at most k entries.
std::vector<const Comment*> rank_feed(std::vector<const Comment*> comments,
                                      std::size_t k);

struct FeedParams {
  std::size_t feed_size = 5;  // posts per session
  int window = 8;             // posts older than this many rounds drop out
  std::size_t top_k = 5;      // comments shown per post
};

struct FeedEntry {
  const Post* post = nullptr;
  std::vector<const Comment*> top_comments;
};
using Feed = std::vector<FeedEntry>;

// (1 + comments + total likes) / (1 + age); takes the post's current state.
double hotness(const Post& post, const std::vector<Comment>& comments, int step);

// Hottest visible posts inside the window, each with its ranked comments.
// Ties on hotness resolve to the newer post, then the lower id.
Feed build_feed(const std::vector<Post>& posts,
                const std::vector<Comment>& comments, int step,
                const FeedParams& params);

std::vector<const Comment*> feed_comments(const Feed& feed);

// --------------------------------------------------------------- users ----

enum class ProfileTag { kA, kB };

std::string_view to_string(ProfileTag tag);

struct UserDynamics {
  double beta = 0.5;       // global influence rate
  double noise_sd = 0.02;  // opinion shock standard deviation
  double activity_scale = 1.0;
};

struct OrdinaryUser {
  std::string id;
  std::string persona_ref;
  double opinion = 0.0;         // [-1, 1]
  double mood = 0.5;            // [0, 1]
  double susceptibility = 0.5;  // [0, 1]
  double activity = 0.5;        // [0, 1]
  ProfileTag profile = ProfileTag::kA;
  std::vector<std::string> memory;  // recent experiences (remote mode)
};

// Like-weighted pull toward the visible discussion:
//   w_j = (likes_j + 1) / sum(likes + 1)
//   o' = clamp(o + sigma*beta*(mu - o) + xi, -1, 1),  xi ~ N(0, noise_sd)
//   s' = clamp(s + sigma*beta*(nu - s), 0, 1)
// An empty visible set leaves the user untouched and draws nothing.
OrdinaryUser update_user(const OrdinaryUser& user,
                         const std::vector<const Comment*>& visible,
                         const UserDynamics& dynamics, Rng& rng);

enum class ActionKind {
  kLikePost,
  kSharePost,
  kCommentPost,
  kLikeComment,
  kFollowUser,
  kIgnore,
};

std::string_view to_string(ActionKind k);
ActionKind parse_action_kind(std::string_view s);

struct UserAction {
  ActionKind kind = ActionKind::kIgnore;
  std::string target;   // post, comment or user id; empty for ignore
  std::string content;  // comment text, filled by the text backend
  double stance = 0.0;
  double sentiment = 0.5;
  double toxicity = 0.0;
};

// clamp(0.1 + 0.6 * |o| * (1 - s), 0, 1)
double toxicity_surrogate(double abs_opinion, double mood);

// Scripted session. The user engages with probability activity *
// activity_scale; an engaged session has 5-8 actions, an idle one none.
std::vector<UserAction> act(const OrdinaryUser& user, const Feed& feed,
                            const UserDynamics& dynamics, Rng& rng);

// The two halves of act(): the engagement draw and an engaged session of
// 5-8 actions.
bool engages(const OrdinaryUser& user, const UserDynamics& dynamics, Rng& rng);
std::vector<UserAction> session(const OrdinaryUser& user, const Feed& feed, Rng& rng);

// Parses a remote {"actions":[...]} reply. Actions whose target is not shown
// in the feed (or is malformed) go to `dropped` as raw JSON text.
std::vector<UserAction> parse_remote_actions(const std::string& reply,
                                             const Feed& feed,
                                             std::vector<std::string>& dropped);

// ----------------------------------------------------------- adversary ----

struct AttackParams {
  std::size_t identities = 15;
  int window = 3;  // rounds an adversarial item stays a target
  int boost_likes = 5;
  std::size_t boosted_per_round = 2;
};

struct MaliciousDraft {
  std::string post_id;
  std::size_t persona_index = 0;
  double stance = -1.0;
  double sentiment = 0.1;
  double toxicity = 0.8;
};

bool in_attack_window(const Post& post, int step, int window);

// For every visible adversarial post published in [step-window+1, step],
// `identities` distinct personas each draft one comment with stance in
// [-1, -0.8], sentiment in [0.05, 0.2] and toxicity in [0.6, 1.0].
std::vector<MaliciousDraft> attack(const std::vector<Post>& posts, int step,
                                   std::size_t pool_size,
                                   const AttackParams& params, Rng& rng);

struct BoostEvent {
  std::string comment_id;
  int likes = 0;
};

// Up to `boosted_per_round` malicious comments on in-window posts, ranked by
// |stance| then likes (then id), each receiving `boost_likes`.
std::vector<BoostEvent> boost(const std::vector<Post>& posts,
                              const std::vector<Comment>& comments, int step,
                              const AttackParams& params);

// ------------------------------------------------------------ personas ----

enum class PersonaType { kNeutral, kPositive, kNegative };

std::string_view to_string(PersonaType t);

struct PersonaRecord {
  std::string id;
  PersonaType type = PersonaType::kNeutral;
  std::string name;
  std::string profession;
  std::string age;
  std::string region;
  std::string background;
  std::vector<std::string> personality_traits;
  std::string tone;
  std::string engagement_level;
  std::string content_preference;
  std::string argument_approach;
};

struct PersonaPool {
  std::vector<PersonaRecord> neutral;
  std::vector<PersonaRecord> positive;
  std::vector<PersonaRecord> negative;

  std::size_t size() const { return neutral.size() + positive.size() + negative.size(); }
  void merge(PersonaPool other);
};

// JSON array of persona records. A record missing a required field is
// rejected with an error naming the record id and the field.
PersonaPool load_personas(const std::filesystem::path& path);

std::string persona_description(const PersonaRecord& p);

}  // namespace evocorps::social

#pragma once

// Post-hoc fact-checking baseline: delayed verdicts, then takedown or a
// visible label.

#include <optional>
#include <string>
#include <vector>

#include "evocorps/gateway.hpp"
#include "evocorps/rng.hpp"
#include "evocorps/types.hpp"

namespace evocorps::moderation {

struct ModerationParams {
  int delay = 3;
  double takedown_confidence = 0.9;
  double false_conf_lo = 0.85;
  double false_conf_hi = 0.99;
};

// Posts published at least `delay` steps ago that carry no verdict yet. A
// post whose check failed stays due and is retried the next step.
std::vector<std::size_t> schedule_checks(const std::vector<Post>& posts, int step,
                                         const ModerationParams& params);

// Scripted oracle over provenance. Likes and shares are never read.
Verdict adjudicate(const Post& post, int step, const ModerationParams& params, Rng& rng);

// Remote fact-check through the gateway. Reads a JSON verdict object when the
// reply has one, else "verdict: ..." / "confidence: ..." lines; throws kParse
// when neither yields a label and a confidence.
Verdict adjudicate_remote(const Post& post, int step, gateway::Gateway& gw,
                          const gateway::PromptLibrary& prompts);

bool is_takedown(const Verdict& v, const ModerationParams& params);

// Attaches the verdict; a takedown hides the post from step + 1 onward.
// Returns whether the post was taken down.
bool enforce(Post& post, const Verdict& verdict, const ModerationParams& params);

}  // namespace evocorps::moderation

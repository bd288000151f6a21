#pragma once

// Evidence knowledge base and action-outcome memory: the team's shared,
// reward-evolved cognition core.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "evocorps/text.hpp"

namespace evocorps::cognition {

struct EvidenceItem {
  std::string id;
  std::string claim_text;
  double persuasiveness = 0.5;  // p_i, kept in [0, 1]
  std::vector<std::string> topic_tags;
  std::string source_label;

  // Tokens used for relevance: normalized topic tags, or the claim's tokens
  // when the item carries no tags.
  TokenSet tokens() const;
};

struct ScoredEvidence {
  const EvidenceItem* item = nullptr;
  double relevance = 0.0;
  double score = 0.0;  // relevance * persuasiveness
};

class KnowledgeBase {
 public:
  KnowledgeBase(double delta, double eta);

  double delta() const { return delta_; }
  double eta() const { return eta_; }

  // Max Jaccard similarity of `tokens` against every stored item and the
  // optional discussion topic.
  double relevance(const TokenSet& tokens, const TokenSet& topic = {}) const;

  // Relevance-gated admission. Returns true when the candidate was added.
  // Throws kDuplicate for an existing id, kInvalidArgument for an empty
  // claim or p outside [0, 1].
  bool admit(EvidenceItem candidate, const TokenSet& topic = {});

  // Ungated insertion used for seeding from an import file.
  void seed(EvidenceItem item);

  // p <- clamp(p + eta * reward, 0, 1) for every selected id. Unknown ids
  // throw kNotFound before anything is modified.
  void reinforce(double reward, const std::vector<std::string>& selected_ids);

  // Top min(m, size) items by relevance(query, item) * p, ties by higher p
  // then id.
  std::vector<ScoredEvidence> select_arguments(const TokenSet& query,
                                               std::size_t m = 5) const;

  const std::vector<EvidenceItem>& items() const { return items_; }
  const EvidenceItem* find(const std::string& id) const;
  std::size_t size() const { return items_.size(); }

 private:
  void validate(const EvidenceItem& item) const;

  double delta_;
  double eta_;
  std::vector<EvidenceItem> items_;
};

// JSONL import: one object per line with claim_text, persuasiveness (default
// 0.5), topic_tags, source_label and an optional id (defaults to kb-<line>).
std::vector<EvidenceItem> load_evidence_jsonl(const std::filesystem::path& path);

struct ActionDescriptor {
  std::string plan_digest;
  std::string leader_digest;
  std::string amplifier_summary;
  std::string timing;
};

struct ObservationRef {
  int step = 0;
  std::string post_id;
  TokenSet topic_tokens;
};

struct MemoryTuple {
  ActionDescriptor action;
  ObservationRef observation;
  double reward = 0.0;
  int step = 0;
};

class ActionOutcomeMemory {
 public:
  // Retains the tuple iff reward > epsilon; returns whether it was kept.
  // epsilon must lie in (0, 1).
  bool record(MemoryTuple tuple, double epsilon);

  // Ranked by Jaccard(report_tokens, observation topic), ties by higher
  // reward, then earlier step.
  std::vector<MemoryTuple> recall(const TokenSet& report_tokens,
                                  std::size_t top_k) const;

  const std::vector<MemoryTuple>& tuples() const { return tuples_; }
  std::size_t size() const { return tuples_.size(); }

  void export_jsonl(const std::filesystem::path& path) const;
  static ActionOutcomeMemory import_jsonl(const std::filesystem::path& path);

 private:
  std::vector<MemoryTuple> tuples_;
};

}  // namespace evocorps::cognition

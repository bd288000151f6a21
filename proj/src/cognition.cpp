#include "evocorps/cognition.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "evocorps/error.hpp"

namespace evocorps::cognition {

using nlohmann::json;

TokenSet EvidenceItem::tokens() const {
  if (!topic_tags.empty()) return normalize_tags(topic_tags);
  return tokenize(claim_text);
}

KnowledgeBase::KnowledgeBase(double delta, double eta)
    : delta_(delta), eta_(eta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "delta must lie in (0, 1)");
  }
}

double KnowledgeBase::relevance(const TokenSet& tokens,
                                const TokenSet& topic) const {
  double best = topic.empty() ? 0.0 : jaccard(tokens, topic);
  for (const auto& item : items_) best = std::max(best, jaccard(tokens, item.tokens()));
  return best;
}

void KnowledgeBase::validate(const EvidenceItem& item) const {
  if (item.claim_text.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "evidence claim_text is empty");
  }
  if (!(item.persuasiveness >= 0.0 && item.persuasiveness <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "evidence persuasiveness outside [0,1] for " + item.id);
  }
  if (find(item.id) != nullptr) {
    throw Error(ErrorCode::kDuplicate, "duplicate evidence id " + item.id);
  }
}

bool KnowledgeBase::admit(EvidenceItem candidate, const TokenSet& topic) {
  validate(candidate);
  if (relevance(candidate.tokens(), topic) > delta_) {
    items_.push_back(std::move(candidate));
    return true;
  }
  return false;
}

void KnowledgeBase::seed(EvidenceItem item) {
  validate(item);
  items_.push_back(std::move(item));
}

void KnowledgeBase::reinforce(double reward,
                              const std::vector<std::string>& selected_ids) {
  std::unordered_set<std::string> selected;
  for (const auto& id : selected_ids) {
    if (find(id) == nullptr) {
      throw Error(ErrorCode::kNotFound, "reinforce: unknown evidence id " + id);
    }
    selected.insert(id);
  }
  for (auto& item : items_) {
    if (!selected.contains(item.id)) continue;
    item.persuasiveness =
        std::clamp(item.persuasiveness + eta_ * reward, 0.0, 1.0);
  }
}

std::vector<ScoredEvidence> KnowledgeBase::select_arguments(
    const TokenSet& query, std::size_t m) const {
  std::vector<ScoredEvidence> ranked;
  ranked.reserve(items_.size());
  for (const auto& item : items_) {
    const double rel = jaccard(query, item.tokens());
    ranked.push_back({&item, rel, rel * item.persuasiveness});
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const ScoredEvidence& a, const ScoredEvidence& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.item->persuasiveness != b.item->persuasiveness) {
                return a.item->persuasiveness > b.item->persuasiveness;
              }
              return a.item->id < b.item->id;
            });
  if (ranked.size() > m) ranked.resize(m);
  return ranked;
}

const EvidenceItem* KnowledgeBase::find(const std::string& id) const {
  for (const auto& item : items_) {
    if (item.id == id) return &item;
  }
  return nullptr;
}

std::vector<EvidenceItem> load_evidence_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open KB seed " + path.string());
  std::vector<EvidenceItem> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(lineno) +
                                         ": " + e.what());
    }
    EvidenceItem item;
    item.id = j.value("id", "kb-" + std::to_string(lineno));
    item.claim_text = j.value("claim_text", std::string{});
    item.persuasiveness = j.value("persuasiveness", 0.5);
    item.topic_tags = j.value("topic_tags", std::vector<std::string>{});
    item.source_label = j.value("source_label", std::string{});
    if (item.claim_text.empty()) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(lineno) +
                                         ": missing claim_text");
    }
    out.push_back(std::move(item));
  }
  return out;
}

bool ActionOutcomeMemory::record(MemoryTuple tuple, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon_mem must lie in (0, 1)");
  }
  if (!(tuple.reward > epsilon)) return false;
  tuples_.push_back(std::move(tuple));
  return true;
}

std::vector<MemoryTuple> ActionOutcomeMemory::recall(const TokenSet& report_tokens,
                                                     std::size_t top_k) const {
  std::vector<std::pair<double, const MemoryTuple*>> ranked;
  ranked.reserve(tuples_.size());
  for (const auto& t : tuples_) {
    ranked.emplace_back(jaccard(report_tokens, t.observation.topic_tokens), &t);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    if (a.second->reward != b.second->reward) return a.second->reward > b.second->reward;
    return a.second->step < b.second->step;
  });
  std::vector<MemoryTuple> out;
  for (std::size_t i = 0; i < ranked.size() && i < top_k; ++i) {
    out.push_back(*ranked[i].second);
  }
  return out;
}

void ActionOutcomeMemory::export_jsonl(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& t : tuples_) {
    json j = {{"step", t.step},
              {"reward", t.reward},
              {"action",
               {{"plan_digest", t.action.plan_digest},
                {"leader_digest", t.action.leader_digest},
                {"amplifier_summary", t.action.amplifier_summary},
                {"timing", t.action.timing}}},
              {"observation",
               {{"step", t.observation.step},
                {"post_id", t.observation.post_id},
                {"topic_tokens", t.observation.topic_tokens}}}};
    out << j.dump() << '\n';
  }
}

ActionOutcomeMemory ActionOutcomeMemory::import_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  ActionOutcomeMemory mem;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      MemoryTuple t;
      t.step = j.at("step").get<int>();
      t.reward = j.at("reward").get<double>();
      const auto& a = j.at("action");
      t.action = {a.value("plan_digest", ""), a.value("leader_digest", ""),
                  a.value("amplifier_summary", ""), a.value("timing", "")};
      const auto& o = j.at("observation");
      t.observation.step = o.value("step", 0);
      t.observation.post_id = o.value("post_id", "");
      t.observation.topic_tokens = o.value("topic_tokens", TokenSet{});
      mem.tuples_.push_back(std::move(t));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
    }
  }
  return mem;
}

}  // namespace evocorps::cognition

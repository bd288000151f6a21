#include "evocorps/types.hpp"

#include <charconv>
#include <cstdio>

#include "evocorps/error.hpp"

namespace evocorps {

std::string_view to_string(AgentType t) {
  switch (t) {
    case AgentType::kNormal: return "normal";
    case AgentType::kMalicious: return "malicious";
    case AgentType::kAmplifier: return "amplifier";
    case AgentType::kLeader: return "leader";
  }
  return "normal";
}

AgentType parse_agent_type(std::string_view s) {
  if (s == "normal") return AgentType::kNormal;
  if (s == "malicious") return AgentType::kMalicious;
  if (s == "amplifier") return AgentType::kAmplifier;
  if (s == "leader") return AgentType::kLeader;
  throw Error(ErrorCode::kParse, "unknown agent_type '" + std::string(s) + "'");
}

std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::kBenign: return "benign";
    case Polarity::kAdversarial: return "adversarial";
    case Polarity::kClarification: return "clarification";
  }
  return "benign";
}

Polarity parse_polarity(std::string_view s) {
  if (s == "benign") return Polarity::kBenign;
  if (s == "adversarial") return Polarity::kAdversarial;
  if (s == "clarification") return Polarity::kClarification;
  throw Error(ErrorCode::kParse, "unknown polarity '" + std::string(s) + "'");
}

std::string_view to_string(VerdictLabel l) {
  switch (l) {
    case VerdictLabel::kTrue: return "true";
    case VerdictLabel::kFalse: return "false";
    case VerdictLabel::kUnverified: return "unverified";
  }
  return "unverified";
}

VerdictLabel parse_verdict_label(std::string_view s) {
  if (s == "true") return VerdictLabel::kTrue;
  if (s == "false") return VerdictLabel::kFalse;
  if (s == "unverified") return VerdictLabel::kUnverified;
  throw Error(ErrorCode::kParse, "unknown verdict label '" + std::string(s) + "'");
}

namespace {

std::string padded(char prefix, std::size_t index, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, index + 1);
  return buf;
}

std::optional<std::size_t> index_of(std::string_view id, char prefix) {
  if (id.size() < 2 || id.front() != prefix) return std::nullopt;
  std::size_t n = 0;
  const auto* first = id.data() + 1;
  const auto* last = id.data() + id.size();
  auto [ptr, ec] = std::from_chars(first, last, n);
  if (ec != std::errc{} || ptr != last || n == 0) return std::nullopt;
  return n - 1;
}

}  // namespace

std::string post_id_for(std::size_t index) { return padded('p', index, 4); }
std::string comment_id_for(std::size_t index) { return padded('c', index, 6); }
std::optional<std::size_t> comment_index_of(std::string_view id) { return index_of(id, 'c'); }
std::optional<std::size_t> post_index_of(std::string_view id) { return index_of(id, 'p'); }

}  // namespace evocorps

#pragma once

// JSON shapes shared by the log writer, replay and the output files.

#include <json.hpp>

#include "evocorps/cognition.hpp"
#include "evocorps/social.hpp"
#include "evocorps/team.hpp"
#include "evocorps/types.hpp"

namespace evocorps::engine::detail {

Comment comment_from_json(const nlohmann::json& j);
nlohmann::json post_json(const Post& p);
nlohmann::json user_json(const social::OrdinaryUser& u);
social::OrdinaryUser user_from_json(const nlohmann::json& j);
nlohmann::json evidence_json(const cognition::EvidenceItem& e);
cognition::EvidenceItem evidence_from_json(const nlohmann::json& j);
nlohmann::json tuple_json(const cognition::MemoryTuple& t);
cognition::MemoryTuple tuple_from_json(const nlohmann::json& j);
nlohmann::json report_json(const team::AnalysisReport& r);
nlohmann::json plan_json(const team::StrategyPlan& p);
nlohmann::json state_json(const MeanFieldState& s);

}  // namespace evocorps::engine::detail

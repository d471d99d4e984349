#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "swarmlab/behavior.hpp"
#include "swarmlab/core.hpp"

namespace swarmlab {

struct GateCheck {
  bool passed = false;
  std::string evidence;
};

struct SwarmChecklist {
  GateCheck multiple_agents;
  GateCheck similar_agents;
  GateCheck recognizable_group_behavior;
  GateCheck agency;
  GateCheck local_interactions;
  GateCheck decentralized_no_leader;
  bool is_swarm = false;

  /// The six checks in table order, with their column names.
  std::vector<std::pair<std::string, const GateCheck*>> checks() const;
};

inline constexpr double kSimilarityRelTol = 1e-6;

/// Six necessary conditions for a swarm. Every condition other than
/// multiplicity presupposes a group, so a single effective component fails
/// all six. Decentralization presupposes agency: agents that take no
/// actions have no control to distribute.
SwarmChecklist evaluate_swarm_gate(const ContextDescriptor& ctx, std::span<const BehaviorVerdict> verdicts);

nlohmann::json to_json(const SwarmChecklist& c);

/// Aligned text table, one row per labelled checklist, check marks per column.
std::string format_checklist_table(std::span<const std::pair<std::string, SwarmChecklist>> rows);

}  // namespace swarmlab

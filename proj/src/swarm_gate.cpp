#include "swarmlab/swarm_gate.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace swarmlab {

std::vector<std::pair<std::string, const GateCheck*>> SwarmChecklist::checks() const {
  return {{"multiple_agents", &multiple_agents},
          {"similar_agents", &similar_agents},
          {"recognizable_group_behavior", &recognizable_group_behavior},
          {"agency", &agency},
          {"local_interactions", &local_interactions},
          {"decentralized_no_leader", &decentralized_no_leader}};
}

namespace {

// Groups "agent.<i>.<name>" entries by <name> and checks every agent's value
// agrees with the first within a relative tolerance. Returns the first
// offending parameter name, or empty when homogeneous.
std::string first_heterogeneous_param(const std::map<std::string, double>& params) {
  std::map<std::string, std::vector<double>> by_name;
  for (const auto& [key, value] : params) {
    if (key.rfind("agent.", 0) != 0) continue;
    const auto dot = key.find('.', 6);
    if (dot == std::string::npos) continue;
    by_name[key.substr(dot + 1)].push_back(value);
  }
  for (const auto& [name, values] : by_name) {
    const double ref = values.front();
    for (double v : values) {
      const double scale = std::max({std::abs(ref), std::abs(v), 1e-300});
      if (std::abs(v - ref) > kSimilarityRelTol * scale) return name;
    }
  }
  return {};
}

}  // namespace

SwarmChecklist evaluate_swarm_gate(const ContextDescriptor& ctx, std::span<const BehaviorVerdict> verdicts) {
  ctx.validate();
  SwarmChecklist c;
  const int n = ctx.effective_components();
  const bool group = n > 1;
  const std::string no_group = "no group: observer resolves a single component";

  c.multiple_agents = {group, group ? std::to_string(n) + " components at declared scope/resolution"
                                    : ctx.coupling == Coupling::rigid_single_body
                                          ? "parts form one rigid body (N = 1)"
                                          : "only one component (N = 1)"};

  if (!group) {
    c.similar_agents = c.recognizable_group_behavior = c.agency = c.local_interactions =
        c.decentralized_no_leader = {false, no_group};
    c.is_swarm = false;
    return c;
  }

  const std::string odd = first_heterogeneous_param(ctx.dynamics_params);
  c.similar_agents = {odd.empty(), odd.empty() ? "all agents share dynamics family '" + ctx.dynamics_family + "'"
                                               : "per-agent parameter '" + odd + "' differs"};

  const auto shown = std::find_if(verdicts.begin(), verdicts.end(),
                                  [](const BehaviorVerdict& v) { return v.has_true_interval(); });
  c.recognizable_group_behavior = {shown != verdicts.end(),
                                   shown != verdicts.end() ? "behavior '" + shown->behavior_id + "' observed"
                                                           : "no behavior with a debounced true interval"};

  c.agency = {ctx.has_control_input,
              ctx.has_control_input ? "agents choose their own input" : "no control input (d_u = 0)"};

  const bool interacting =
      ctx.coupling == Coupling::local_feedback || ctx.coupling == Coupling::global_information;
  c.local_interactions = {interacting, "coupling is " + to_string(ctx.coupling)};

  std::string why;
  if (!ctx.has_control_input) {
    why = "no agency to decentralize";
  } else if (ctx.leader_present) {
    why = "a leader or external controller is present";
  } else if (ctx.group_goal_aware) {
    why = "agents know the target group behavior";
  } else if (ctx.coupling == Coupling::global_information) {
    why = "agents rely on global information";
  }
  c.decentralized_no_leader = {why.empty(), why.empty() ? "local decisions only, no leader" : why};

  c.is_swarm = true;
  for (const auto& [_, check] : c.checks()) c.is_swarm = c.is_swarm && check->passed;
  return c;
}

nlohmann::json to_json(const SwarmChecklist& c) {
  nlohmann::json j;
  for (const auto& [name, check] : c.checks()) j[name] = {{"passed", check->passed}, {"evidence", check->evidence}};
  j["is_swarm"] = c.is_swarm;
  return j;
}

std::string format_checklist_table(std::span<const std::pair<std::string, SwarmChecklist>> rows) {
  static const std::vector<std::string> headers = {"Multiple", "Similar", "Behavior", "Agency",
                                                   "Local",    "Decentral", "Swarm?"};
  std::size_t label_w = 6;
  for (const auto& [label, _] : rows) label_w = std::max(label_w, label.size());

  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& cells) {
    std::string line = cells[0] + std::string(label_w + 2 - cells[0].size(), ' ');
    for (std::size_t c = 1; c < cells.size(); ++c) {
      line += cells[c];
      if (c + 1 < cells.size()) line += std::string(headers[c - 1].size() + 2 - cells[c].size(), ' ');
    }
    out << line << '\n';
  };
  std::vector<std::string> head = {"System"};
  head.insert(head.end(), headers.begin(), headers.end());
  emit(head);
  for (const auto& [label, c] : rows) {
    std::vector<std::string> cells = {label};
    for (const auto& [_, check] : c.checks()) cells.push_back(check->passed ? "x" : ".");
    cells.push_back(c.is_swarm ? "yes" : "no");
    emit(cells);
  }
  return out.str();
}

}  // namespace swarmlab

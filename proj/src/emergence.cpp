#include "swarmlab/emergence.hpp"

#include <algorithm>

namespace swarmlab {

std::string to_string(EmergenceType t) {
  switch (t) {
    case EmergenceType::Type0_None:
      return "Type0_None";
    case EmergenceType::TypeI_Nominal:
      return "TypeI_Nominal";
    case EmergenceType::TypeII_Weak:
      return "TypeII_Weak";
    case EmergenceType::TypeIII_Strong:
      return "TypeIII_Strong";
  }
  return "unknown";
}

const std::vector<EmergenceRule>& emergence_rules() {
  static const std::vector<EmergenceRule> rules = {
      {"time_varying_context", EmergenceType::TypeIII_Strong,
       [](const ContextDescriptor& c) { return c.time_varying_context; }},
      {"single_effective_component", EmergenceType::Type0_None,
       [](const ContextDescriptor& c) { return c.effective_components() == 1; }},
      {"feedforward_coupling_only", EmergenceType::TypeI_Nominal,
       [](const ContextDescriptor& c) { return c.coupling == Coupling::none_feedforward; }},
      {"interaction_feedback_coupling", EmergenceType::TypeII_Weak,
       [](const ContextDescriptor& c) {
         return c.coupling == Coupling::local_feedback || c.coupling == Coupling::global_information;
       }},
  };
  return rules;
}

EmergenceVerdict classify_emergence(const ContextDescriptor& ctx) {
  ctx.validate();
  EmergenceVerdict v;
  for (const auto& rule : emergence_rules()) {
    const bool hit = rule.applies(ctx);
    v.rationale.push_back({rule.condition, hit});
    if (hit) {
      v.type_label = rule.result;
      return v;
    }
  }
  // Unreachable: a multi-component context has one of the last two couplings
  // once rigid bodies have been folded into rule two.
  throw std::logic_error("emergence rules are not exhaustive");
}

nlohmann::json to_json(const EmergenceVerdict& v) {
  nlohmann::json rationale = nlohmann::json::array();
  for (const auto& r : v.rationale) rationale.push_back({{"condition", r.condition}, {"satisfied", r.satisfied}});
  return {{"type_label", to_string(v.type_label)}, {"rationale", rationale}};
}

EquifinalityReport equifinality_check(const TrajectoryLog& log_a, const ContextDescriptor& ctx_a,
                                      const TrajectoryLog& log_b, const ContextDescriptor& ctx_b,
                                      std::span<const BehaviorSpec> specs, double tol,
                                      const MarkerOptions& options) {
  if (log_a.agent_count() != log_b.agent_count()) throw ValidationError("equifinality: agent counts differ");
  if (log_a.frame_count() != log_b.frame_count()) throw ValidationError("equifinality: time grids differ");
  for (std::size_t k = 0; k < log_a.frame_count(); ++k) {
    if (std::abs(log_a.timestamps()[k] - log_b.timestamps()[k]) > kFixedStepTolerance) {
      throw ValidationError("equifinality: time grids differ");
    }
  }

  EquifinalityReport r;
  for (std::size_t k = 0; k < log_a.frame_count(); ++k) {
    const auto& fa = log_a.frames()[k];
    const auto& fb = log_b.frames()[k];
    for (std::size_t i = 0; i < fa.size(); ++i) {
      r.max_position_discrepancy = std::max(r.max_position_discrepancy, (fa[i].position - fb[i].position).norm());
    }
  }

  const auto ma = compute_marker_series(log_a, options);
  const auto mb = compute_marker_series(log_b, options);
  r.behaviors_a = behavior_matrix(specs, ma, log_a.timestamps());
  r.behaviors_b = behavior_matrix(specs, mb, log_b.timestamps());
  r.behaviors_identical = r.behaviors_a == r.behaviors_b;
  r.verdict_a = classify_emergence(ctx_a);
  r.verdict_b = classify_emergence(ctx_b);
  r.equifinal = r.max_position_discrepancy <= tol && r.behaviors_identical &&
                r.verdict_a.type_label != r.verdict_b.type_label;
  return r;
}

}  // namespace swarmlab

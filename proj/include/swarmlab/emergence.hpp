#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "swarmlab/behavior.hpp"
#include "swarmlab/core.hpp"

namespace swarmlab {

enum class EmergenceType { Type0_None, TypeI_Nominal, TypeII_Weak, TypeIII_Strong };

std::string to_string(EmergenceType t);

struct RuleRecord {
  std::string condition;
  bool satisfied = false;
};

struct EmergenceVerdict {
  EmergenceType type_label = EmergenceType::Type0_None;
  std::vector<RuleRecord> rationale;  // rules consulted, in order
};

/// One classification rule. `applies` is the rule's own condition, not
/// including the negation of earlier rules.
struct EmergenceRule {
  std::string condition;
  EmergenceType result;
  bool (*applies)(const ContextDescriptor&);
};

/// The ordered decision list: time-varying context, single effective
/// component, feedforward coupling, interaction coupling.
const std::vector<EmergenceRule>& emergence_rules();

/// Walks the decision list and stops at the first rule that applies. The
/// label depends on the declared context only, never on trajectories.
EmergenceVerdict classify_emergence(const ContextDescriptor& ctx);

nlohmann::json to_json(const EmergenceVerdict& v);

struct EquifinalityReport {
  double max_position_discrepancy = 0.0;
  BehaviorMatrix behaviors_a;
  BehaviorMatrix behaviors_b;
  bool behaviors_identical = false;
  EmergenceVerdict verdict_a;
  EmergenceVerdict verdict_b;
  bool equifinal = false;
};

/// Compares two logs on the same agent count and time grid. Equifinal means
/// positions agree within `tol`, behavior matrices are identical, and the
/// contexts yield different emergence types.
EquifinalityReport equifinality_check(const TrajectoryLog& log_a, const ContextDescriptor& ctx_a,
                                      const TrajectoryLog& log_b, const ContextDescriptor& ctx_b,
                                      std::span<const BehaviorSpec> specs, double tol,
                                      const MarkerOptions& options = {});

}  // namespace swarmlab

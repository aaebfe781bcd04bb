#pragma once

#include <variant>
#include <vector>

#include "blocksbench/constraints.hpp"
#include "blocksbench/domain.hpp"
#include "json.hpp"

namespace blocksbench {

struct Plan {
  std::vector<Action> steps;
};

nlohmann::json plan_to_json(const Plan& plan);

/// A step that parsed as JSON but is not a well-formed action. Verification
/// reports it at its index instead of failing the whole document, so agents
/// get a per-step explanation.
struct MalformedStep {
  std::string message;
};

using ParsedStep = std::variant<Action, MalformedStep>;

struct ParsedPlan {
  std::vector<ParsedStep> steps;
};

struct SchemaError {
  std::string pointer;  // JSON pointer to the offending element
  std::string message;
};

/// Accepts {"steps": [{"action": ..., "block": ..., "target"?: ...}, ...]}.
/// `target` is required for stack/unstack and rejected otherwise. Document
/// level problems are SchemaErrors; step level problems come back as
/// MalformedStep entries.
Result<ParsedPlan, SchemaError> parse_plan_json(const nlohmann::json& doc);

struct Verified {
  bool reaches_goal;
};
struct Rejected {
  int first_bad_index;  // 0-based
  Violation violation;  // message uses 1-based step numbering
};
using PlanVerdict = std::variant<Verified, Rejected>;

/// Dry-runs the plan on a copy of `state`: applies steps in order, stops at
/// the first violation. Never mutates inputs; uses the true state even under
/// partial observability.
PlanVerdict verify_plan(const WorldState& state, const GoalSpec& goal,
                        const ParsedPlan& plan, ConstraintSet cs);
PlanVerdict verify_plan(const WorldState& state, const GoalSpec& goal,
                        const Plan& plan, ConstraintSet cs);

/// Wire form of a verdict: {"verified":true,"reaches_goal":...,"message":...}
/// or {"verified":false,"first_bad_index":...,"rule_id":...,"message":...}.
nlohmann::json verdict_to_json(const PlanVerdict& verdict, size_t step_count);

}  // namespace blocksbench

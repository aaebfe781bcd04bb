#include "blocksbench/verifier.hpp"

namespace blocksbench {

using nlohmann::json;

json plan_to_json(const Plan& plan) {
  json steps = json::array();
  for (const auto& action : plan.steps) {
    json step{{"action", to_string(action.kind)}, {"block", action.block}};
    if (action.kind == ActionKind::Stack || action.kind == ActionKind::Unstack) {
      step["target"] = action.target;
    }
    steps.push_back(std::move(step));
  }
  return json{{"steps", std::move(steps)}};
}

namespace {

ParsedStep parse_step(const json& step) {
  if (!step.is_object()) return MalformedStep{"step is not a JSON object"};
  if (!step.contains("action") || !step["action"].is_string()) {
    return MalformedStep{"missing or non-string 'action' field"};
  }
  const std::string name = step["action"].get<std::string>();
  auto kind = parse_action_kind(name);
  if (!kind) {
    return MalformedStep{
        "unknown action '" + name +
        "' (expected pick_up, put_down, stack or unstack)"};
  }
  if (!step.contains("block") || !step["block"].is_string()) {
    return MalformedStep{"missing or non-string 'block' field"};
  }
  bool needs_target =
      *kind == ActionKind::Stack || *kind == ActionKind::Unstack;
  if (needs_target && (!step.contains("target") || !step["target"].is_string())) {
    return MalformedStep{"missing or non-string 'target' field for " + name};
  }
  if (!needs_target && step.contains("target")) {
    return MalformedStep{"'target' is not allowed for " + name};
  }
  Action action;
  action.kind = *kind;
  action.block = step["block"].get<std::string>();
  if (needs_target) action.target = step["target"].get<std::string>();
  return action;
}

std::string step_prefix(int index) {
  return "Step " + std::to_string(index + 1) + " is invalid: ";
}

}  // namespace

Result<ParsedPlan, SchemaError> parse_plan_json(const json& doc) {
  if (!doc.is_object()) {
    return SchemaError{"", "plan document must be a JSON object"};
  }
  if (!doc.contains("steps")) {
    return SchemaError{"/steps", "missing required field 'steps'"};
  }
  if (!doc["steps"].is_array()) {
    return SchemaError{"/steps", "'steps' must be an array"};
  }
  ParsedPlan plan;
  for (const auto& step : doc["steps"]) {
    plan.steps.push_back(parse_step(step));
  }
  return plan;
}

PlanVerdict verify_plan(const WorldState& state, const GoalSpec& goal,
                        const ParsedPlan& plan, ConstraintSet cs) {
  WorldState current = state;
  for (int i = 0; i < static_cast<int>(plan.steps.size()); ++i) {
    const auto& step = plan.steps[i];
    if (const auto* bad = std::get_if<MalformedStep>(&step)) {
      return Rejected{
          i, Violation{RuleId::Malformed, step_prefix(i) + bad->message,
                       std::nullopt}};
    }
    const auto& action = std::get<Action>(step);
    if (auto violation = validate(current, action, cs)) {
      violation->message = step_prefix(i) + violation->message;
      return Rejected{i, *violation};
    }
    current = apply_action(current, action, cs).value();
  }
  return Verified{is_goal(current, goal)};
}

PlanVerdict verify_plan(const WorldState& state, const GoalSpec& goal,
                        const Plan& plan, ConstraintSet cs) {
  ParsedPlan parsed;
  for (const auto& action : plan.steps) parsed.steps.push_back(action);
  return verify_plan(state, goal, parsed, cs);
}

json verdict_to_json(const PlanVerdict& verdict, size_t step_count) {
  if (const auto* ok = std::get_if<Verified>(&verdict)) {
    std::string message =
        "Plan verified: all " + std::to_string(step_count) +
        " steps are executable";
    message += ok->reaches_goal
                   ? " and the plan reaches the goal."
                   : ", but the final state does not satisfy the goal.";
    return json{{"verified", true},
                {"reaches_goal", ok->reaches_goal},
                {"message", message}};
  }
  const auto& rejected = std::get<Rejected>(verdict);
  return json{{"verified", false},
              {"first_bad_index", rejected.first_bad_index},
              {"rule_id", to_string(rejected.violation.rule_id)},
              {"message", rejected.violation.message}};
}

}  // namespace blocksbench

#pragma once

#include "blocksbench/domain.hpp"

namespace blocksbench {

/// Sentinel used in observations for blocks hidden by partial observability.
inline constexpr const char* kUnknownName = "unknown";

struct Violation {
  RuleId rule_id;
  std::string message;
  std::optional<Action> action;  // absent for malformed plan steps
};

/// Full pre-execution check: structural legality plus the rules of `cs`.
/// Ok (nullopt) guarantees apply_action succeeds.
std::optional<Violation> validate(const WorldState& state, const Action& action,
                                  ConstraintSet cs);

/// What an agent is allowed to see. Under base/block_size this is the
/// identity view; under partial_observability only the top two blocks of
/// each stack keep their names, deeper entries become "unknown" and their
/// catalog entries (name and size) are withheld.
struct Observation {
  int positions = 0;
  std::vector<std::vector<std::string>> stacks;  // one list per position
  GripperStatus gripper;                         // always visible
  std::vector<Block> visible_blocks;             // sorted by name
};

Observation observe(const WorldState& state, ConstraintSet cs);

/// Deterministic natural-language rules text for the active constraint set,
/// instantiated with the concrete position count.
std::string describe_rules(ConstraintSet cs, int positions);

}  // namespace blocksbench

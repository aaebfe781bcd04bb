#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blocksbench/result.hpp"

namespace blocksbench {

struct Block {
  std::string name;
  int size = 1;
};

/// Which rule family governs a session. Base physics always applies;
/// block_size additionally forbids stacking larger onto smaller;
/// partial_observability keeps base physics but masks observations.
enum class ConstraintSet { Base, BlockSize, PartialObservability };

std::string to_string(ConstraintSet cs);
std::optional<ConstraintSet> parse_constraint_set(const std::string& s);

enum class ActionKind { PickUp, PutDown, Stack, Unstack };

std::string to_string(ActionKind kind);
std::optional<ActionKind> parse_action_kind(const std::string& s);

struct Action {
  ActionKind kind;
  std::string block;
  std::string target;  // only meaningful for Stack / Unstack
};

struct GripperStatus {
  std::optional<std::string> holding;  // nullopt = empty gripper
};

/// Full (un-masked) world state. `positions[i]` is the stack at table
/// position i, listed bottom to top; empty vector = free position.
struct WorldState {
  std::vector<std::vector<std::string>> positions;
  GripperStatus gripper;
  std::map<std::string, Block> blocks;  // catalog, keyed by name

  int block_size(const std::string& name) const;
  /// (position index, height index) of a block, or nullopt if held/absent.
  std::optional<std::pair<int, int>> locate(const std::string& name) const;
  bool is_top(const std::string& name) const;
  std::optional<int> first_free_position() const;
};

/// Goal stacks are bottom-to-top and matched position-agnostically: the
/// multiset of built stacks must equal the multiset of goal stacks.
struct GoalSpec {
  std::vector<std::vector<std::string>> stacks;
  std::string description;
};

enum class RuleId {
  GripperOccupied,
  GripperEmpty,
  HeldMismatch,
  UnknownBlock,
  BlockNotClear,
  BlockNotOnTable,
  NotOnTarget,
  NoFreePosition,
  SizeOrder,
  Malformed,
};

std::string to_string(RuleId id);

struct ActionError {
  RuleId rule_id;
  std::string message;
};

/// First violated rule for `action` in `state` under `cs`, or nullopt if the
/// action is legal. Check order is fixed (see docs/api.md) so the reported
/// rule is deterministic.
std::optional<ActionError> check_action(const WorldState& state,
                                        const Action& action, ConstraintSet cs);

/// Applies a legal action; returns the violation otherwise. Input is never
/// mutated.
Result<WorldState, ActionError> apply_action(const WorldState& state,
                                             const Action& action,
                                             ConstraintSet cs);

/// True when the gripper is empty and the nonempty stacks equal the goal
/// stacks as a multiset (table positions are interchangeable).
bool is_goal(const WorldState& state, const GoalSpec& goal);

/// Fast lookup of the block each goal block must rest on (nullopt = table).
class GoalIndex {
 public:
  explicit GoalIndex(const GoalSpec& goal);

  bool contains(const std::string& name) const;
  /// Required support of `name`, if `name` appears in the goal.
  std::optional<std::optional<std::string>> below(const std::string& name) const;

 private:
  std::map<std::string, std::optional<std::string>> below_;
};

/// A block is in position when the chain from the table up to it matches a
/// goal stack's bottom prefix exactly; held blocks never are.
bool in_position(const WorldState& state, const GoalIndex& index,
                 const std::string& name);

/// Number of blocks not in position (used as the search heuristic).
int misplaced_count(const WorldState& state, const GoalIndex& index);

/// Constructive = a placement that brings the moved block into position.
bool is_constructive(const WorldState& before, const Action& action,
                     const GoalIndex& index);

/// Fixed-width text drawing of the table, gripper and catalog.
std::string render_ascii(const WorldState& state);

}  // namespace blocksbench

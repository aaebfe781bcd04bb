#pragma once

#include <cstdint>
#include <variant>

#include "blocksbench/verifier.hpp"

namespace blocksbench {

struct SearchLimits {
  uint64_t max_states = 5'000'000;  // canonical states touched
  int max_depth = 120;
  /// When set, skip static shortcuts (goal over capacity, goal not covering
  /// the block set, size-impossible goal stacks) and prove unsolvability by
  /// exhausting the reachable set instead.
  bool require_closure = false;
};

struct Solved {
  Plan plan;
  bool optimal;
};
struct Unsolvable {
  uint64_t explored_states;  // size of the closed reachable set (0 = static proof)
};
struct ResourceLimit {
  uint64_t explored_states;
  int depth_reached;
};
using SolveResult = std::variant<Solved, Unsolvable, ResourceLimit>;

/// Optimal search: exhaustive BFS over canonicalized states on small
/// instances, IDA* (misplaced-count heuristic, per-contour transposition
/// table) on larger ones. Exhaustion without finding a goal — a BFS frontier
/// that empties, or an IDA* contour with no successor bound — is a proof of
/// unsolvability.
SolveResult solve(const WorldState& initial, const GoalSpec& goal,
                  ConstraintSet cs, const SearchLimits& limits = {});

using LengthResult = std::variant<int, Unsolvable, ResourceLimit>;

LengthResult min_solution_length(const WorldState& initial,
                                 const GoalSpec& goal, ConstraintSet cs,
                                 const SearchLimits& limits = {});

struct PlanStats {
  int length = 0;
  int constructive = 0;
  int non_constructive = 0;
};

/// Classifies every step of a plan that must verify against (state, goal).
Result<PlanStats, Rejected> plan_stats(const WorldState& initial,
                                       const GoalSpec& goal, ConstraintSet cs,
                                       const Plan& plan);

/// Always-terminating constructive fallback for base-physics instances
/// (used when exhaustive search exceeds its budget): builds the goal stacks
/// bottom-up, dumping covers onto free positions or other stacks. Returns a
/// valid (generally non-optimal) plan, or nullopt when the instance resists
/// (e.g. under block_size).
std::optional<Plan> staged_plan(const WorldState& initial, const GoalSpec& goal,
                                ConstraintSet cs);

}  // namespace blocksbench

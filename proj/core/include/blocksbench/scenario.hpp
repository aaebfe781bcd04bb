#pragma once

#include <string>
#include <vector>

#include "blocksbench/planner.hpp"

namespace blocksbench {

struct ScenarioMetadata {
  std::optional<int> min_solution_length;  // nullopt = impossible
  bool length_is_upper_bound = false;
  int block_count = 0;
  int stack_positions = 0;
  int misplaced_blocks = 0;
  std::optional<int> non_constructive_in_optimal;  // nullopt = impossible
};

/// Category 0 stands for ad-hoc ("custom") scenarios started inline.
struct Scenario {
  std::string id;
  int category = 0;
  ConstraintSet constraint_set = ConstraintSet::Base;
  int positions = 3;
  std::vector<Block> blocks;  // sorted by name
  std::vector<std::vector<std::string>> initial_stacks;  // one per position
  GripperStatus initial_gripper;
  GoalSpec goal;
  ScenarioMetadata metadata;

  WorldState initial_state() const;
};

/// Strict schema used for shipped files: every field required, all
/// cross-field invariants enforced (unique names, conservation, goal
/// coverage, category/constraint pairing, metadata consistency).
Result<Scenario, SchemaError> load_scenario(const nlohmann::json& doc);
Result<Scenario, SchemaError> load_scenario_file(const std::string& path);

/// Lenient variant for inline session starts: id, category and metadata may
/// be omitted (defaulting to "custom"); physical invariants still apply.
Result<Scenario, SchemaError> load_custom_scenario(const nlohmann::json& doc);

/// Canonical serialization (sorted keys); the shipped files are exactly
/// dump(2) of this plus a trailing newline.
nlohmann::json scenario_to_json(const Scenario& scenario);
std::string scenario_to_file_bytes(const Scenario& scenario);

/// Reruns the oracle: optimal length and classification counts, or the
/// staged-builder upper bound when search exceeds its budgets (flagged via
/// length_is_upper_bound). Errors when neither path produces an answer.
Result<ScenarioMetadata, std::string> recompute_metadata(
    const Scenario& scenario, const SearchLimits& limits = {});

/// Deterministic goal sentence, e.g. "Stack B on C and A on B; place D alone
/// on the table."
std::string describe_goal(const GoalSpec& goal);

class ScenarioStore {
 public:
  /// Loads scenarios/cat*/<id>.json under `dir`; fails on the first invalid
  /// file. Entries are sorted by id.
  static Result<ScenarioStore, std::string> load_dir(const std::string& dir);

  /// Inserts (or replaces, by id) keeping the sorted order.
  void add(Scenario scenario);

  const Scenario* find(const std::string& id) const;
  const std::vector<Scenario>& all() const { return scenarios_; }

 private:
  std::vector<Scenario> scenarios_;
};

/// Full shipped-suite audit: shape (50 scenarios, 10 per category, fixed id
/// scheme), per-scenario envelope bounds, metadata identical to a fresh
/// recompute, and the category-defining properties (cat1 len == 2*misplaced,
/// cat2 len > 2*misplaced, cat3 proven unreachable by closure, cat4 strictly
/// longer than the same instance without the size rule, cat5 solvable with a
/// starting stack of height >= 3). Returns human-readable problems; empty
/// means the suite is sound.
std::vector<std::string> validate_suite(const ScenarioStore& store,
                                        const SearchLimits& limits = {});

}  // namespace blocksbench

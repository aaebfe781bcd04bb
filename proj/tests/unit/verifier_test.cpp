#include "blocksbench/verifier.hpp"

#include <string>
#include <variant>

#include "doctest.h"
#include "test_util.hpp"

using namespace blocksbench;
using nlohmann::json;
using testutil::make_goal;
using testutil::make_world;

namespace {

Plan tower_plan() {
  return Plan{{{ActionKind::Unstack, "C", "A"},
               {ActionKind::PutDown, "C", ""},
               {ActionKind::PickUp, "B", ""},
               {ActionKind::Stack, "B", "C"},
               {ActionKind::PickUp, "A", ""},
               {ActionKind::Stack, "A", "B"}}};
}

}  // namespace

TEST_CASE("the six-step tower rebuild verifies and reaches the goal") {
  auto verdict = verify_plan(testutil::tower_initial(),
                             testutil::tower_goal(), tower_plan(),
                             ConstraintSet::Base);
  auto* ok = std::get_if<Verified>(&verdict);
  REQUIRE(ok);
  CHECK(ok->reaches_goal);
}

TEST_CASE("a legal plan that stops short is verified but incomplete") {
  Plan prefix{{{ActionKind::Unstack, "C", "A"}, {ActionKind::PutDown, "C", ""}}};
  auto verdict = verify_plan(testutil::tower_initial(),
                             testutil::tower_goal(), prefix,
                             ConstraintSet::Base);
  auto* ok = std::get_if<Verified>(&verdict);
  REQUIRE(ok);
  CHECK(!ok->reaches_goal);

  auto wire = verdict_to_json(verdict, 2);
  CHECK(wire["verified"] == true);
  CHECK(wire["reaches_goal"] == false);
  CHECK(wire["message"] ==
        "Plan verified: all 2 steps are executable, but the final state does "
        "not satisfy the goal.");
}

TEST_CASE("the empty plan verifies; it reaches the goal only if already there") {
  Plan empty;
  auto before = verify_plan(testutil::tower_initial(),
                            testutil::tower_goal(), empty,
                            ConstraintSet::Base);
  REQUIRE(std::holds_alternative<Verified>(before));
  CHECK(!std::get<Verified>(before).reaches_goal);

  auto solved = make_world({{"C", "B", "A"}, {}, {}});
  auto after =
      verify_plan(solved, testutil::tower_goal(), empty, ConstraintSet::Base);
  REQUIRE(std::holds_alternative<Verified>(after));
  CHECK(std::get<Verified>(after).reaches_goal);
}

TEST_CASE("rejection reports the first bad step with 1-based wording") {
  Plan plan{{{ActionKind::Unstack, "C", "A"},
             {ActionKind::PutDown, "C", ""},
             {ActionKind::PickUp, "C", ""},  // C is fine; gripper is empty...
             {ActionKind::PickUp, "B", ""}}};  // ...but now it is occupied
  auto verdict = verify_plan(testutil::tower_initial(),
                             testutil::tower_goal(), plan,
                             ConstraintSet::Base);
  auto* bad = std::get_if<Rejected>(&verdict);
  REQUIRE(bad);
  CHECK(bad->first_bad_index == 3);
  CHECK(bad->violation.rule_id == RuleId::GripperOccupied);
  CHECK(bad->violation.message ==
        "Step 4 is invalid: The gripper is already holding C.");

  auto wire = verdict_to_json(verdict, plan.steps.size());
  CHECK(wire["verified"] == false);
  CHECK(wire["first_bad_index"] == 3);
  CHECK(wire["rule_id"] == "gripper_occupied");
}

TEST_CASE("rejection index equals the first failure of a linear re-run") {
  auto initial = testutil::tower_initial();
  Plan plan{{{ActionKind::Unstack, "C", "A"},
             {ActionKind::Stack, "C", "B"},
             {ActionKind::Unstack, "C", "B"},
             {ActionKind::Stack, "C", "A"},
             {ActionKind::PickUp, "A", ""}}};  // A is covered by C here
  auto verdict = verify_plan(initial, testutil::tower_goal(), plan,
                             ConstraintSet::Base);
  auto* bad = std::get_if<Rejected>(&verdict);
  REQUIRE(bad);

  WorldState ws = initial;
  int failed_at = -1;
  for (int i = 0; i < static_cast<int>(plan.steps.size()); ++i) {
    auto next = apply_action(ws, plan.steps[i], ConstraintSet::Base);
    if (!next.ok()) {
      failed_at = i;
      break;
    }
    ws = next.value();
  }
  CHECK(failed_at == bad->first_bad_index);
  CHECK(bad->first_bad_index == 4);
  CHECK(bad->violation.rule_id == RuleId::BlockNotClear);
}

TEST_CASE("verification never mutates the input state") {
  auto initial = testutil::tower_initial();
  auto snapshot = initial;
  (void)verify_plan(initial, testutil::tower_goal(), tower_plan(),
                    ConstraintSet::Base);
  CHECK(initial.positions == snapshot.positions);
  CHECK(initial.gripper.holding == snapshot.gripper.holding);
}

TEST_CASE("plan parsing accepts the wire schema and round trips") {
  auto doc = plan_to_json(tower_plan());
  CHECK(doc["steps"].size() == 6);
  CHECK(doc["steps"][0] ==
        json{{"action", "unstack"}, {"block", "C"}, {"target", "A"}});
  CHECK(doc["steps"][1] == json{{"action", "put_down"}, {"block", "C"}});

  auto parsed = parse_plan_json(doc);
  REQUIRE(parsed.ok());
  auto verdict = verify_plan(testutil::tower_initial(),
                             testutil::tower_goal(), parsed.value(),
                             ConstraintSet::Base);
  REQUIRE(std::holds_alternative<Verified>(verdict));
  CHECK(std::get<Verified>(verdict).reaches_goal);
}

TEST_CASE("document-level problems are schema errors") {
  auto not_object = parse_plan_json(json::array());
  REQUIRE(!not_object.ok());
  CHECK(not_object.error().message == "plan document must be a JSON object");

  auto missing = parse_plan_json(json{{"actions", json::array()}});
  REQUIRE(!missing.ok());
  CHECK(missing.error().pointer == "/steps");

  auto wrong_type = parse_plan_json(json{{"steps", "unstack C"}});
  REQUIRE(!wrong_type.ok());
  CHECK(wrong_type.error().pointer == "/steps");
}

TEST_CASE("step-level problems surface as malformed rejections at their index") {
  json doc{{"steps", json::array({
                         json{{"action", "unstack"}, {"block", "C"},
                              {"target", "A"}},
                         json{{"action", "hover"}, {"block", "C"}},
                     })}};
  auto parsed = parse_plan_json(doc);
  REQUIRE(parsed.ok());
  auto verdict = verify_plan(testutil::tower_initial(),
                             testutil::tower_goal(), parsed.value(),
                             ConstraintSet::Base);
  auto* bad = std::get_if<Rejected>(&verdict);
  REQUIRE(bad);
  CHECK(bad->first_bad_index == 1);
  CHECK(bad->violation.rule_id == RuleId::Malformed);
  CHECK(bad->violation.message ==
        "Step 2 is invalid: unknown action 'hover' (expected pick_up, "
        "put_down, stack or unstack)");

  SUBCASE("missing target") {
    json steps{{"steps", json::array({json{{"action", "stack"}, {"block", "A"}}})}};
    auto plan = parse_plan_json(steps);
    REQUIRE(plan.ok());
    auto v = verify_plan(testutil::tower_initial(), testutil::tower_goal(),
                         plan.value(), ConstraintSet::Base);
    auto* r = std::get_if<Rejected>(&v);
    REQUIRE(r);
    CHECK(r->violation.rule_id == RuleId::Malformed);
    CHECK(r->violation.message.find("'target'") != std::string::npos);
  }

  SUBCASE("stray target") {
    json steps{{"steps", json::array({json{{"action", "pick_up"},
                                           {"block", "B"},
                                           {"target", "C"}}})}};
    auto plan = parse_plan_json(steps);
    REQUIRE(plan.ok());
    auto v = verify_plan(testutil::tower_initial(), testutil::tower_goal(),
                         plan.value(), ConstraintSet::Base);
    auto* r = std::get_if<Rejected>(&v);
    REQUIRE(r);
    CHECK(r->violation.rule_id == RuleId::Malformed);
    CHECK(r->violation.message ==
          "Step 1 is invalid: 'target' is not allowed for pick_up");
  }

  SUBCASE("non-object step") {
    json steps{{"steps", json::array({"unstack C from A"})}};
    auto plan = parse_plan_json(steps);
    REQUIRE(plan.ok());
    auto v = verify_plan(testutil::tower_initial(), testutil::tower_goal(),
                         plan.value(), ConstraintSet::Base);
    auto* r = std::get_if<Rejected>(&v);
    REQUIRE(r);
    CHECK(r->violation.message ==
          "Step 1 is invalid: step is not a JSON object");
  }
}

TEST_CASE("verification respects the active constraint set") {
  auto ws = make_world({{"A"}, {"B"}, {}}, std::nullopt, {{"A", 1}, {"B", 2}});
  Plan plan{{{ActionKind::PickUp, "B", ""}, {ActionKind::Stack, "B", "A"}}};
  auto goal = make_goal({{"A", "B"}});

  auto base = verify_plan(ws, goal, plan, ConstraintSet::Base);
  REQUIRE(std::holds_alternative<Verified>(base));
  CHECK(std::get<Verified>(base).reaches_goal);

  auto sized = verify_plan(ws, goal, plan, ConstraintSet::BlockSize);
  auto* bad = std::get_if<Rejected>(&sized);
  REQUIRE(bad);
  CHECK(bad->first_bad_index == 1);
  CHECK(bad->violation.rule_id == RuleId::SizeOrder);
}

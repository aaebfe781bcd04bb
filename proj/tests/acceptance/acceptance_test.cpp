// Acceptance suite: nine end-to-end criteria over the shipped scenario tree,
// the search oracle, the verifier, the service layers and the harness. Each
// criterion prints exactly one PASS/FAIL line; the process exits nonzero if
// any criterion fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "blocksbench/generator.hpp"
#include "blocksbench/harness.hpp"
#include "blocksbench/mcp_gateway.hpp"
#include "blocksbench/planner.hpp"
#include "blocksbench/scenario.hpp"
#include "blocksbench/service.hpp"
#include "blocksbench/verifier.hpp"
#include "brute_force.hpp"
#include "httplib.h"
#include "test_util.hpp"

using namespace blocksbench;
using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) return "<unreadable:" + path + ">";
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ScenarioStore& store() {
  static ScenarioStore instance = [] {
    auto loaded = ScenarioStore::load_dir(testutil::scenario_dir());
    if (!loaded.ok()) {
      std::fprintf(stderr, "cannot load scenario tree: %s\n",
                   loaded.error().c_str());
      std::exit(2);
    }
    return loaded.value();
  }();
  return instance;
}

// ---- random-instance helpers shared by criteria 5 and 6 ----------------

WorldState random_instance(std::mt19937& rng, int blocks, int positions,
                           bool sized, bool legal_for_size) {
  std::vector<std::string> names;
  for (int i = 0; i < blocks; ++i) names.push_back(block_name(i));
  std::shuffle(names.begin(), names.end(), rng);

  WorldState ws;
  ws.positions.resize(positions);
  for (const auto& name : names) {
    int size = sized ? 1 + static_cast<int>(rng() % 3) : 1;
    ws.blocks[name] = Block{name, size};
    ws.positions[rng() % positions].push_back(name);
  }
  if (legal_for_size) {
    for (auto& stack : ws.positions) {
      std::stable_sort(stack.begin(), stack.end(),
                       [&](const std::string& a, const std::string& b) {
                         return ws.blocks[a].size > ws.blocks[b].size;
                       });
    }
  }
  return ws;
}

Action random_action(std::mt19937& rng, const WorldState& ws) {
  std::vector<std::string> names;
  for (const auto& [name, block] : ws.blocks) {
    (void)block;
    names.push_back(name);
  }
  auto any = [&] { return names[rng() % names.size()]; };

  // half the draws aim for something plausible so walks make progress
  if (rng() % 2 == 0) {
    if (ws.gripper.holding) {
      if (rng() % 2 == 0) return {ActionKind::PutDown, *ws.gripper.holding, ""};
      return {ActionKind::Stack, *ws.gripper.holding, any()};
    }
    std::vector<std::pair<std::string, std::string>> tops;  // top, support
    for (const auto& stack : ws.positions) {
      if (stack.empty()) continue;
      tops.push_back({stack.back(),
                      stack.size() > 1 ? stack[stack.size() - 2] : ""});
    }
    if (!tops.empty()) {
      auto [top, support] = tops[rng() % tops.size()];
      if (support.empty()) return {ActionKind::PickUp, top, ""};
      return {ActionKind::Unstack, top, support};
    }
  }
  ActionKind kind = static_cast<ActionKind>(rng() % 4);
  Action action{kind, any(), ""};
  if (kind == ActionKind::Stack || kind == ActionKind::Unstack) {
    action.target = any();
  }
  return action;
}

std::string state_fingerprint(const WorldState& ws) {
  json doc{{"stacks", ws.positions},
           {"held", ws.gripper.holding ? json(*ws.gripper.holding) : json()}};
  return doc.dump();
}

// ---- criteria ----------------------------------------------------------

std::string criterion_suite_shape() {
  auto t0 = std::chrono::steady_clock::now();

  auto suite = generate_suite();
  if (!suite.ok()) return "regeneration failed: " + suite.error();
  if (suite.value().size() != 50) {
    return "regeneration produced " + std::to_string(suite.value().size()) +
           " scenarios";
  }
  for (const auto& scenario : suite.value()) {
    auto path =
        std::string(testutil::scenario_dir()) + "/" + scenario.id + ".json";
    if (scenario_to_file_bytes(scenario) != slurp(path)) {
      return "regenerated " + scenario.id + " differs from the shipped file";
    }
  }

  auto problems = validate_suite(store());
  if (!problems.empty()) {
    return std::to_string(problems.size()) +
           " validation problems; first: " + problems.front();
  }

  double elapsed = seconds_since(t0);
  if (elapsed >= 300.0) {
    return "took " + std::to_string(elapsed) + "s (budget 300s)";
  }
  return "";
}

std::string criterion_oracle_verifier_live() {
  auto t0 = std::chrono::steady_clock::now();

  for (const Scenario& scenario : store().all()) {
    if (!scenario.metadata.min_solution_length) continue;

    auto result = solve(scenario.initial_state(), scenario.goal,
                        scenario.constraint_set);
    auto* solved = std::get_if<Solved>(&result);
    if (!solved) return scenario.id + ": oracle did not solve";
    if (static_cast<int>(solved->plan.steps.size()) !=
        *scenario.metadata.min_solution_length) {
      return scenario.id + ": plan length " +
             std::to_string(solved->plan.steps.size()) + " != stored " +
             std::to_string(*scenario.metadata.min_solution_length);
    }

    auto verdict = verify_plan(scenario.initial_state(), scenario.goal,
                               solved->plan, scenario.constraint_set);
    auto* ok = std::get_if<Verified>(&verdict);
    if (!ok || !ok->reaches_goal) {
      return scenario.id + ": oracle plan failed verification";
    }

    SimService service(store());
    auto started = service.start({{"scenario_id", scenario.id}});
    if (started.http_status != 200) return scenario.id + ": start failed";
    for (const Action& step : solved->plan.steps) {
      json args{{"block", step.block}};
      if (step.kind == ActionKind::Stack || step.kind == ActionKind::Unstack) {
        args["target"] = step.target;
      }
      auto response = service.execute(step.kind, args);
      if (!response.body.value("success", false)) {
        return scenario.id + ": live step failed: " +
               response.body["error"]["message"].get<std::string>();
      }
    }

    // replay the log over the initial state; it must land on the goal
    WorldState ws = scenario.initial_state();
    auto log_env = service.log();
    for (const auto& entry : log_env.body["data"]["entries"]) {
      Action action;
      action.kind = *parse_action_kind(entry["action"]["action"]);
      action.block = entry["action"]["block"].get<std::string>();
      if (entry["action"].contains("target")) {
        action.target = entry["action"]["target"].get<std::string>();
      }
      auto next = apply_action(ws, action, scenario.constraint_set);
      if (!next.ok()) return scenario.id + ": log replay diverged";
      ws = next.value();
    }
    if (!is_goal(ws, scenario.goal)) {
      return scenario.id + ": live execution did not reach the goal";
    }
  }

  double elapsed = seconds_since(t0);
  if (elapsed >= 600.0) {
    return "took " + std::to_string(elapsed) + "s (budget 600s)";
  }
  return "";
}

std::string criterion_optimality_crosscheck() {
  for (const Scenario& scenario : store().all()) {
    if (scenario.blocks.size() > 8) continue;
    bool size_rule = scenario.constraint_set == ConstraintSet::BlockSize;
    auto independent = bftest::bf_min_length(scenario.initial_state(),
                                             scenario.goal, size_rule);
    if (independent.capped) return scenario.id + ": reference search capped";

    if (scenario.metadata.min_solution_length) {
      if (!independent.length) {
        return scenario.id + ": reference search finds no solution";
      }
      if (*independent.length != *scenario.metadata.min_solution_length) {
        return scenario.id + ": reference optimum " +
               std::to_string(*independent.length) + " != stored " +
               std::to_string(*scenario.metadata.min_solution_length);
      }
    } else if (independent.length) {
      return scenario.id + ": reference search solves an impossible scenario";
    }
  }

  // frozen regression constants
  WorldState shuffled = testutil::tower_initial();
  GoalSpec tower = testutil::tower_goal();
  auto fast = min_solution_length(shuffled, tower, ConstraintSet::Base);
  if (!std::holds_alternative<int>(fast) || std::get<int>(fast) != 6) {
    return "planner does not give 6 for the three-block tower rebuild";
  }
  auto slow = bftest::bf_min_length(shuffled, tower, false);
  if (!slow.length || *slow.length != 6) {
    return "reference search does not give 6 for the tower rebuild";
  }

  auto hanoi = testutil::make_world({{"C", "B", "A"}, {"D"}, {}}, std::nullopt,
                                    {{"C", 3}, {"B", 2}, {"A", 1}, {"D", 4}});
  GoalSpec moved{{{"D", "C", "B", "A"}}, ""};
  auto fast_h = min_solution_length(hanoi, moved, ConstraintSet::BlockSize);
  if (!std::holds_alternative<int>(fast_h) || std::get<int>(fast_h) != 14) {
    return "planner does not give 14 for the three-disk column move";
  }
  auto slow_h = bftest::bf_min_length(hanoi, moved, true);
  if (!slow_h.length || *slow_h.length != 14) {
    return "reference search does not give 14 for the three-disk column move";
  }
  return "";
}

std::string criterion_impossibility() {
  SearchLimits closure;
  closure.require_closure = true;
  int proofs = 0;
  for (const Scenario& scenario : store().all()) {
    if (scenario.category != 3) continue;
    auto result = solve(scenario.initial_state(), scenario.goal,
                        scenario.constraint_set, closure);
    auto* impossible = std::get_if<Unsolvable>(&result);
    if (!impossible) return scenario.id + ": closure did not prove unsolvable";
    if (impossible->explored_states == 0 ||
        impossible->explored_states > closure.max_states) {
      return scenario.id + ": closure outside the state budget";
    }
    ++proofs;
  }
  if (proofs != 10) return "expected 10 impossibility proofs";

  HarnessConfig config;
  config.agents = {"oracle"};
  config.categories = {3};
  auto report = run_harness(store(), config);
  if (!report.ok()) return report.error();
  const auto& cell = report.value()["summary"]["oracle"]["cat3"];
  if (cell["correct"] != 10 || cell["declared_impossible"] != 10) {
    return "oracle judged " + cell["correct"].dump() + "/10 correctly";
  }
  return "";
}

std::string criterion_verifier_purity() {
  std::mt19937 rng(515151);
  for (ConstraintSet cs : {ConstraintSet::Base, ConstraintSet::BlockSize,
                           ConstraintSet::PartialObservability}) {
    for (int round = 0; round < 1000; ++round) {
      int blocks = 3 + static_cast<int>(rng() % 6);
      int positions = 3 + static_cast<int>(rng() % 3);
      WorldState ws = random_instance(rng, blocks, positions,
                                      cs == ConstraintSet::BlockSize,
                                      cs == ConstraintSet::BlockSize);
      GoalSpec goal{random_instance(rng, blocks, positions, false, false)
                        .positions,
                    ""};
      goal.stacks.erase(
          std::remove_if(goal.stacks.begin(), goal.stacks.end(),
                         [](const auto& s) { return s.empty(); }),
          goal.stacks.end());

      ParsedPlan plan;
      int steps = static_cast<int>(rng() % 12);
      for (int i = 0; i < steps; ++i) {
        if (rng() % 10 == 0) {
          plan.steps.push_back(MalformedStep{"fuzzed step"});
        } else {
          plan.steps.push_back(random_action(rng, ws));
        }
      }

      std::string before = state_fingerprint(ws);
      auto verdict = verify_plan(ws, goal, plan, cs);
      if (state_fingerprint(ws) != before) {
        return "verify_plan mutated its input state";
      }

      if (auto* rejected = std::get_if<Rejected>(&verdict)) {
        // cross-check with a plain linear re-simulation
        WorldState current = ws;
        int failed_at = -1;
        for (int i = 0; i < static_cast<int>(plan.steps.size()); ++i) {
          if (std::holds_alternative<MalformedStep>(plan.steps[i])) {
            failed_at = i;
            break;
          }
          const auto& action = std::get<Action>(plan.steps[i]);
          auto next = apply_action(current, action, cs);
          if (!next.ok()) {
            failed_at = i;
            break;
          }
          current = next.value();
        }
        if (failed_at != rejected->first_bad_index) {
          return "first_bad_index " +
                 std::to_string(rejected->first_bad_index) +
                 " but linear replay fails at " + std::to_string(failed_at);
        }
      }
    }
  }
  return "";
}

std::string criterion_constraint_soundness() {
  std::mt19937 rng(626262);
  for (ConstraintSet cs : {ConstraintSet::Base, ConstraintSet::BlockSize,
                           ConstraintSet::PartialObservability}) {
    for (int walk = 0; walk < 10000; ++walk) {
      int blocks = 3 + static_cast<int>(rng() % 6);
      int positions = 3 + static_cast<int>(rng() % 3);
      WorldState ws = random_instance(rng, blocks, positions,
                                      cs != ConstraintSet::Base,
                                      cs == ConstraintSet::BlockSize);
      size_t catalog = ws.blocks.size();

      for (int step = 0; step < 14; ++step) {
        Action action = random_action(rng, ws);
        auto violation = validate(ws, action, cs);
        auto applied = apply_action(ws, action, cs);
        if (violation && applied.ok()) {
          return "validate rejects but apply accepts " + to_string(action.kind);
        }
        if (!violation && !applied.ok()) {
          return "validate accepts but apply rejects " + to_string(action.kind);
        }
        if (!applied.ok()) continue;
        ws = applied.value();

        // conservation and structural invariants
        size_t placed = ws.gripper.holding ? 1 : 0;
        for (const auto& stack : ws.positions) placed += stack.size();
        if (placed != catalog) return "blocks were created or destroyed";
        if (static_cast<int>(ws.positions.size()) != positions) {
          return "table positions changed";
        }
        for (const auto& stack : ws.positions) {
          for (const auto& name : stack) {
            if (!ws.blocks.count(name)) return "unknown block on the table";
            if (ws.gripper.holding == name) return "held block also stacked";
          }
        }

        if (cs == ConstraintSet::BlockSize) {
          for (const auto& stack : ws.positions) {
            for (size_t h = 1; h < stack.size(); ++h) {
              if (ws.blocks[stack[h]].size > ws.blocks[stack[h - 1]].size) {
                return "a larger block ended up above a smaller one";
              }
            }
          }
        }
        if (cs == ConstraintSet::PartialObservability) {
          auto obs = observe(ws, cs);
          for (size_t p = 0; p < ws.positions.size(); ++p) {
            size_t h = ws.positions[p].size();
            size_t named = 0, unknown = 0;
            for (const auto& entry : obs.stacks[p]) {
              (entry == kUnknownName ? unknown : named)++;
            }
            if (named > 2) return "observation names more than two blocks";
            if (unknown != (h > 2 ? h - 2 : 0)) {
              return "observation hides the wrong number of blocks";
            }
          }
        }
      }
    }
  }
  return "";
}

std::string criterion_protocol_conformance() {
  // two sessions driven in lockstep: one through real JSON-RPC, one through
  // real HTTP; their payloads must agree call by call
  SimService mcp_service(store());
  SimService rest_service(store());
  for (auto* service : {&mcp_service, &rest_service}) {
    auto started = service->start({{"scenario_id", "cat2/s05"}});
    if (started.http_status != 200) return "could not start the session";
  }

  DirectUpstream upstream(mcp_service);
  McpGateway gateway(upstream);
  auto send = [&](json message) -> json {
    auto response = gateway.handle_line(message.dump());
    if (!response) return json();
    return *response;
  };
  int next_id = 1;
  auto init = send({{"jsonrpc", "2.0"},
                    {"id", next_id++},
                    {"method", "initialize"},
                    {"params", json::object()}});
  if (!init.contains("result")) return "initialize failed";
  send(json{{"jsonrpc", "2.0"}, {"method", "notifications/initialized"}});

  auto tools = send({{"jsonrpc", "2.0"},
                     {"id", next_id++},
                     {"method", "tools/list"},
                     {"params", json::object()}});
  const auto& list = tools["result"]["tools"];
  if (list.size() != 7) {
    return "tools/list returned " + std::to_string(list.size()) + " tools";
  }
  for (const auto& tool : list) {
    auto desc = tool["description"].get<std::string>();
    if (desc.find("Arguments:") == std::string::npos ||
        desc.find("Response:") == std::string::npos) {
      return tool["name"].get<std::string>() + " lacks the uniform sections";
    }
    auto name = tool["name"].get<std::string>();
    if (name == "pick_up" || name == "put_down" || name == "stack" ||
        name == "unstack") {
      if (desc.find("Preconditions:") == std::string::npos ||
          desc.find("Effects:") == std::string::npos) {
        return name + " lacks precondition/effect sections";
      }
    }
  }

  RestServer server(rest_service);
  int port = server.bind_any();
  if (port <= 0) return "could not bind a loopback port";
  std::thread runner([&server] { server.run(); });
  httplib::Client http("127.0.0.1", port);
  http.set_connection_timeout(5);

  const Scenario* scenario = store().find("cat2/s05");
  std::vector<std::string> names;
  for (const auto& block : scenario->blocks) names.push_back(block.name);

  std::mt19937 rng(737373);
  std::string failure;
  for (int round = 0; round < 100 && failure.empty(); ++round) {
    auto any = [&] { return names[rng() % names.size()]; };
    int die = static_cast<int>(rng() % 8);

    std::string tool;
    json arguments = json::object();
    std::string rest_path;
    bool rest_post = false;
    json rest_body;

    if (die == 0) {
      tool = "get_rules";
      rest_path = "/rules";
    } else if (die == 1) {
      tool = "get_status";
      rest_path = "/status";
    } else if (die == 2) {
      tool = "verify_plan";
      json steps = json::array();
      int n = static_cast<int>(rng() % 5);
      for (int i = 0; i < n; ++i) {
        const char* kinds[] = {"pick_up", "put_down", "stack", "unstack"};
        std::string kind = kinds[rng() % 4];
        json step{{"action", kind}, {"block", any()}};
        if (kind == "stack" || kind == "unstack") step["target"] = any();
        steps.push_back(std::move(step));
      }
      arguments["steps"] = steps;
      rest_path = "/verify";
      rest_post = true;
      rest_body = {{"steps", steps}};
    } else {
      const char* kinds[] = {"pick_up", "put_down", "stack", "unstack"};
      tool = kinds[rng() % 4];
      arguments["block"] = any();
      if (tool == "stack" || tool == "unstack") arguments["target"] = any();
      rest_path = "/actions/" + tool;
      rest_post = true;
      rest_body = arguments;
    }

    int id = next_id++;
    auto response = send({{"jsonrpc", "2.0"},
                          {"id", id},
                          {"method", "tools/call"},
                          {"params", {{"name", tool},
                                      {"arguments", arguments}}}});

    // JSON-RPC 2.0 framing
    if (response["jsonrpc"] != "2.0" || response["id"] != id) {
      failure = "bad JSON-RPC framing in round " + std::to_string(round);
      break;
    }
    if (response.contains("result") == response.contains("error")) {
      failure = "response carries neither or both of result/error";
      break;
    }
    if (!response.contains("result")) {
      failure = "tool call errored: " + response["error"].dump();
      break;
    }

    auto rest_response = rest_post
                             ? http.Post(rest_path, rest_body.dump(),
                                         "application/json")
                             : http.Get(rest_path);
    if (!rest_response) {
      failure = "http transport failure";
      break;
    }
    auto envelope = json::parse(rest_response->body, nullptr, false);
    if (envelope.is_discarded()) {
      failure = "http response is not JSON";
      break;
    }
    bool success = envelope.value("success", false);
    const json& payload = success ? envelope["data"] : envelope["error"];
    if (response["result"]["structuredContent"] != payload) {
      failure = tool + " payload diverged in round " + std::to_string(round);
      break;
    }
  }

  server.stop();
  runner.join();
  return failure;
}

json harness_report(uint64_t seed) {
  HarnessConfig config;
  config.agents = {"oracle", "reveal", "greedy"};
  config.categories = {1, 2, 3, 4, 5};
  config.transport = "direct";
  config.seed = seed;
  auto report = run_harness(store(), config);
  if (!report.ok()) return json();
  return report.value();
}

std::string criterion_floor_ceiling() {
  auto report = harness_report(1);
  if (report.is_null()) return "harness run failed";
  const auto& summary = report["summary"];

  for (auto cat : {"cat1", "cat2", "cat4"}) {
    const auto& cell = summary["oracle"][cat];
    if (cell["correct"] != 10) {
      return std::string("oracle ") + cat + ": " + cell["correct"].dump() +
             "/10 correct";
    }
  }
  const auto& reveal = summary["reveal"]["cat5"];
  if (reveal["correct"] != 10) {
    return "reveal cat5: " + reveal["correct"].dump() + "/10 correct";
  }
  for (const auto& episode : report["episodes"]) {
    if (episode["agent"] == "reveal" && episode["verify_attempts"] != 1) {
      return episode["scenario_id"].get<std::string>() +
             ": reveal needed " + episode["verify_attempts"].dump() +
             " verification attempts";
    }
    if (episode["agent"] == "oracle" && episode["correct"] != true) {
      return episode["scenario_id"].get<std::string>() + ": oracle incorrect";
    }
  }
  const auto& greedy = summary["greedy"]["cat2"];
  if (greedy["correct"].get<int>() >= 10) {
    return "greedy unexpectedly solved every category-2 scenario";
  }
  return "";
}

std::string criterion_determinism() {
  auto first = harness_report(7);
  auto second = harness_report(7);
  if (first.is_null() || second.is_null()) return "harness run failed";
  if (strip_wall_times(first) != strip_wall_times(second)) {
    return "reports differ beyond wall_time fields";
  }
  // wall times must be the only difference: removing them reconciles the docs
  if (first == second) {
    // vanishingly unlikely, but not wrong; both runs measured identical times
  }
  return "";
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    std::function<std::string()> run;
  };
  std::vector<Criterion> criteria{
      {1, "suite shape, regeneration and validation", criterion_suite_shape},
      {2, "oracle, verifier and live execution agree", criterion_oracle_verifier_live},
      {3, "independent search confirms every small optimum", criterion_optimality_crosscheck},
      {4, "category 3 proven unsolvable by closure", criterion_impossibility},
      {5, "verification is pure and reports the first bad step", criterion_verifier_purity},
      {6, "random action walks preserve all invariants", criterion_constraint_soundness},
      {7, "mcp and rest payloads agree under json-rpc framing", criterion_protocol_conformance},
      {8, "scripted agents hit their floors and ceilings", criterion_floor_ceiling},
      {9, "benchmark reports are deterministic", criterion_determinism},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    std::string problem = criterion.run();
    double elapsed = seconds_since(t0);
    if (problem.empty()) {
      std::printf("[PASS] %d. %s (%.1fs)\n", criterion.number, criterion.name,
                  elapsed);
    } else {
      ++failures;
      std::printf("[FAIL] %d. %s (%.1fs): %s\n", criterion.number,
                  criterion.name, elapsed, problem.c_str());
    }
    std::fflush(stdout);
  }
  if (failures) {
    std::printf("%d of 9 acceptance criteria failed\n", failures);
    return 1;
  }
  std::printf("all 9 acceptance criteria passed\n");
  return 0;
}

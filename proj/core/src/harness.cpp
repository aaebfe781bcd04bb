#include "blocksbench/harness.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <sstream>
#include <thread>

#include "blocksbench/planner.hpp"
#include "blocksbench/verifier.hpp"
#include "httplib.h"

namespace blocksbench {

namespace {

using nlohmann::json;

json action_args(const Action& action) {
  json args{{"block", action.block}};
  if (action.kind == ActionKind::Stack || action.kind == ActionKind::Unstack) {
    args["target"] = action.target;
  }
  return args;
}

bool envelope_ok(const json& envelope) {
  return envelope.is_object() && envelope.value("success", false);
}

std::string envelope_message(const json& envelope) {
  if (envelope.is_object() && envelope.contains("error")) {
    return envelope["error"].value("message", "");
  }
  return "";
}

WorldState state_from_observation(const json& data) {
  WorldState ws;
  for (const auto& stack : data["stacks"]) {
    ws.positions.push_back(stack.get<std::vector<std::string>>());
  }
  if (data["gripper"].contains("block")) {
    ws.gripper.holding = data["gripper"]["block"].get<std::string>();
  }
  for (const auto& block : data["blocks"]) {
    Block b{block["name"].get<std::string>(), block.value("size", 1)};
    ws.blocks[b.name] = b;
  }
  return ws;
}

}  // namespace

nlohmann::json DirectClient::call_status() { return service_.status().body; }
nlohmann::json DirectClient::call_verify(const nlohmann::json& plan) {
  return service_.verify(plan).body;
}
nlohmann::json DirectClient::call_execute(ActionKind kind,
                                          const nlohmann::json& args) {
  return service_.execute(kind, args).body;
}

namespace {

json http_envelope(const std::string& base_url, bool post,
                   const std::string& path, const json* body) {
  httplib::Client client(base_url);
  client.set_connection_timeout(5, 0);
  httplib::Result res =
      post ? client.Post(path, body ? body->dump() : "{}", "application/json")
           : client.Get(path);
  if (!res) {
    return error_envelope(std::nullopt, "cannot reach " + base_url + path +
                                            " (" +
                                            httplib::to_string(res.error()) +
                                            ")");
  }
  auto parsed = json::parse(res->body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object() ||
      !parsed.contains("success")) {
    return error_envelope(std::nullopt, "malformed response from " + path);
  }
  return parsed;
}

}  // namespace

nlohmann::json RestClient::call_status() {
  return http_envelope(base_url_, false, "/status", nullptr);
}
nlohmann::json RestClient::call_verify(const nlohmann::json& plan) {
  return http_envelope(base_url_, true, "/verify", &plan);
}
nlohmann::json RestClient::call_execute(ActionKind kind,
                                        const nlohmann::json& args) {
  return http_envelope(base_url_, true, "/actions/" + to_string(kind), &args);
}

McpClient::McpClient(McpGateway& gateway) : gateway_(gateway) {
  json init{{"jsonrpc", "2.0"},
            {"id", next_id_++},
            {"method", "initialize"},
            {"params",
             {{"protocolVersion", McpGateway::kProtocolVersion},
              {"capabilities", json::object()},
              {"clientInfo", {{"name", "blocksbench-harness"}}}}}};
  gateway_.handle_line(init.dump());
  json note{{"jsonrpc", "2.0"}, {"method", "notifications/initialized"}};
  gateway_.handle_line(note.dump());
}

nlohmann::json McpClient::call(const std::string& tool, json arguments,
                               const char* success_key) {
  json request{{"jsonrpc", "2.0"},
               {"id", next_id_++},
               {"method", "tools/call"},
               {"params",
                {{"name", tool}, {"arguments", std::move(arguments)}}}};
  auto response = gateway_.handle_line(request.dump());
  if (!response || !response->contains("result")) {
    std::string message = "no response";
    if (response && response->contains("error")) {
      message = (*response)["error"].value("message", "rpc error");
    }
    return error_envelope(std::nullopt, message);
  }
  json payload =
      (*response)["result"].value("structuredContent", json::object());
  if (payload.contains(success_key)) return ok_envelope(std::move(payload));
  return json{{"success", false}, {"error", std::move(payload)}};
}

nlohmann::json McpClient::call_status() {
  return call("get_status", json::object(), "stacks");
}
nlohmann::json McpClient::call_verify(const nlohmann::json& plan) {
  json arguments{{"steps", plan.contains("steps") ? plan["steps"]
                                                  : json::array()}};
  return call("verify_plan", std::move(arguments), "verified");
}
nlohmann::json McpClient::call_execute(ActionKind kind,
                                       const nlohmann::json& args) {
  return call(to_string(kind), args, "state");
}

nlohmann::json CountingClient::call_status() {
  ++total_;
  ++status_;
  return inner_.call_status();
}
nlohmann::json CountingClient::call_verify(const nlohmann::json& plan) {
  ++total_;
  ++verify_;
  payloads_.insert(plan.dump());
  return inner_.call_verify(plan);
}
nlohmann::json CountingClient::call_execute(ActionKind kind,
                                            const nlohmann::json& args) {
  ++total_;
  ++execute_;
  return inner_.call_execute(kind, args);
}

namespace {

AgentOutcome give_up(std::string note) {
  AgentOutcome outcome;
  outcome.gave_up = true;
  outcome.note = std::move(note);
  return outcome;
}

/// Plans with the production solver from the true initial state, verifies the
/// plan once, then executes it. Declares impossibility when the solver proves
/// closure.
class OracleAgent : public Agent {
 public:
  std::string name() const override { return "oracle"; }
  std::vector<int> default_categories() const override {
    return {1, 2, 3, 4, 5};
  }

  AgentOutcome run(const Scenario& scenario, ToolClient& client) override {
    auto result = solve(scenario.initial_state(), scenario.goal,
                        scenario.constraint_set);
    if (std::holds_alternative<Unsolvable>(result)) {
      AgentOutcome outcome;
      outcome.declared_impossible = true;
      outcome.note = "goal proven unreachable";
      return outcome;
    }
    if (std::holds_alternative<ResourceLimit>(result)) {
      return give_up("search budget exhausted");
    }
    const Plan& plan = std::get<Solved>(result).plan;

    auto verdict = client.call_verify(plan_to_json(plan));
    if (!envelope_ok(verdict)) {
      return give_up("verify failed: " + envelope_message(verdict));
    }
    const json& data = verdict["data"];
    if (!data.value("verified", false) || !data.value("reaches_goal", false)) {
      return give_up("oracle plan rejected: " + data.value("message", ""));
    }
    for (const Action& step : plan.steps) {
      auto outcome = client.call_execute(step.kind, action_args(step));
      if (!envelope_ok(outcome)) {
        return give_up("execution failed: " + envelope_message(outcome));
      }
    }
    return {};
  }
};

/// Information-gathering policy for partial observability. Never reads the
/// scenario's true stacks: it digs every stack down until all entries have
/// been observed, parking blocks out of the way, then undoes the digging in
/// reverse so the session is back at its initial state. Having reconstructed
/// that state from observations alone, it plans, verifies once and executes.
class RevealAgent : public Agent {
 public:
  std::string name() const override { return "reveal"; }
  std::vector<int> default_categories() const override { return {5}; }

  AgentOutcome run(const Scenario& scenario, ToolClient& client) override {
    auto env = client.call_status();
    if (!envelope_ok(env)) {
      return give_up("status failed: " + envelope_message(env));
    }
    init_model(env["data"]);
    if (model_holding_) return give_up("unexpected initial held block");

    std::vector<DigRecord> digs;
    int guard = 0;
    while (true) {
      if (++guard > 512) return give_up("dig did not converge");
      int s = first_unknown_stack();
      if (s < 0) break;
      auto& stack = model_[s];
      std::string top = *stack[stack.size() - 1];
      std::string support = *stack[stack.size() - 2];
      if (!exec(client, {ActionKind::Unstack, top, support})) {
        return give_up(error_);
      }

      Action park{ActionKind::PutDown, top, ""};
      if (!has_empty_stack()) {
        int dest = park_stack(s);
        if (dest < 0) return give_up("no parking destination");
        park = {ActionKind::Stack, top, *model_[dest].back()};
      }
      if (!exec(client, park)) return give_up(error_);
      digs.push_back({top, support, park});
    }

    for (auto it = digs.rbegin(); it != digs.rend(); ++it) {
      Action unpark = it->park.kind == ActionKind::PutDown
                          ? Action{ActionKind::PickUp, it->block, ""}
                          : Action{ActionKind::Unstack, it->block,
                                   it->park.target};
      if (!exec(client, unpark)) return give_up(error_);
      if (!exec(client, {ActionKind::Stack, it->block, it->support})) {
        return give_up(error_);
      }
    }

    WorldState initial = model_state();
    auto result = solve(initial, scenario.goal, scenario.constraint_set);
    if (!std::holds_alternative<Solved>(result)) {
      return give_up("no plan from the reconstructed state");
    }
    const Plan& plan = std::get<Solved>(result).plan;
    auto verdict = client.call_verify(plan_to_json(plan));
    if (!envelope_ok(verdict)) {
      return give_up("verify failed: " + envelope_message(verdict));
    }
    const json& data = verdict["data"];
    if (!data.value("verified", false) || !data.value("reaches_goal", false)) {
      return give_up("reconstructed plan rejected: " +
                     data.value("message", ""));
    }
    for (const Action& step : plan.steps) {
      if (!exec(client, step)) return give_up(error_);
    }
    return {};
  }

 private:
  struct DigRecord {
    std::string block;
    std::string support;
    Action park;
  };

  void init_model(const json& data) {
    model_.clear();
    for (const auto& stack : data["stacks"]) {
      std::vector<std::optional<std::string>> entries;
      for (const auto& entry : stack) {
        std::string name = entry.get<std::string>();
        if (name == kUnknownName) {
          entries.push_back(std::nullopt);
        } else {
          entries.push_back(name);
        }
      }
      model_.push_back(std::move(entries));
    }
    model_holding_.reset();
    if (data["gripper"].contains("block")) {
      model_holding_ = data["gripper"]["block"].get<std::string>();
    }
    overlay(data);
  }

  void overlay(const json& data) {
    const auto& stacks = data["stacks"];
    for (size_t p = 0; p < model_.size() && p < stacks.size(); ++p) {
      for (size_t d = 0; d < model_[p].size() && d < stacks[p].size(); ++d) {
        std::string name = stacks[p][d].get<std::string>();
        if (name != kUnknownName) model_[p][d] = name;
      }
    }
    for (const auto& block : data["blocks"]) {
      sizes_[block["name"].get<std::string>()] = block.value("size", 1);
    }
  }

  /// Executes one action, mirrors it onto the model, then folds the fresh
  /// observation in (this is where newly visible entries land).
  bool exec(ToolClient& client, const Action& action) {
    auto env = client.call_execute(action.kind, action_args(action));
    if (!envelope_ok(env)) {
      error_ = "action " + to_string(action.kind) + " " + action.block +
               " failed: " + envelope_message(env);
      return false;
    }
    apply_model(action);
    overlay(env["data"]["state"]);
    return true;
  }

  void apply_model(const Action& action) {
    switch (action.kind) {
      case ActionKind::PickUp:
      case ActionKind::Unstack:
        for (auto& stack : model_) {
          if (!stack.empty() && stack.back() &&
              *stack.back() == action.block) {
            stack.pop_back();
            model_holding_ = action.block;
            return;
          }
        }
        return;
      case ActionKind::PutDown:
        for (auto& stack : model_) {
          if (stack.empty()) {
            stack.push_back(action.block);
            model_holding_.reset();
            return;
          }
        }
        return;
      case ActionKind::Stack:
        for (auto& stack : model_) {
          if (!stack.empty() && stack.back() &&
              *stack.back() == action.target) {
            stack.push_back(action.block);
            model_holding_.reset();
            return;
          }
        }
        return;
    }
  }

  int first_unknown_stack() const {
    for (size_t p = 0; p < model_.size(); ++p) {
      for (const auto& entry : model_[p]) {
        if (!entry) return static_cast<int>(p);
      }
    }
    return -1;
  }

  bool has_empty_stack() const {
    for (const auto& stack : model_) {
      if (stack.empty()) return true;
    }
    return false;
  }

  /// Lowest-indexed other stack, preferring fully observed ones.
  int park_stack(int digging) const {
    for (int pass = 0; pass < 2; ++pass) {
      for (size_t p = 0; p < model_.size(); ++p) {
        if (static_cast<int>(p) == digging || model_[p].empty()) continue;
        bool known = true;
        for (const auto& entry : model_[p]) known &= entry.has_value();
        if (pass == 0 ? known : true) return static_cast<int>(p);
      }
    }
    return -1;
  }

  WorldState model_state() const {
    WorldState ws;
    for (const auto& stack : model_) {
      std::vector<std::string> names;
      for (const auto& entry : stack) names.push_back(entry.value_or("?"));
      ws.positions.push_back(std::move(names));
    }
    ws.gripper.holding = model_holding_;
    for (const auto& [name, size] : sizes_) ws.blocks[name] = {name, size};
    return ws;
  }

  std::vector<std::vector<std::optional<std::string>>> model_;
  std::optional<std::string> model_holding_;
  std::map<std::string, int> sizes_;
  std::string error_;
};

/// Myopic constructive policy: only ever acquires a misplaced block, and only
/// when a placement that puts it straight into its goal position is available;
/// never verifies, never parks. Deadlocks (and gives up) whenever finishing
/// would require a non-constructive move.
class GreedyAgent : public Agent {
 public:
  std::string name() const override { return "greedy"; }
  std::vector<int> default_categories() const override { return {2}; }

  AgentOutcome run(const Scenario& scenario, ToolClient& client) override {
    GoalIndex index(scenario.goal);
    int limit = static_cast<int>(scenario.blocks.size()) * 4 + 8;
    for (int round = 0; round < limit; ++round) {
      auto env = client.call_status();
      if (!envelope_ok(env)) {
        return give_up("status failed: " + envelope_message(env));
      }
      const json& data = env["data"];
      for (const auto& stack : data["stacks"]) {
        for (const auto& entry : stack) {
          if (entry.get<std::string>() == kUnknownName) {
            return give_up("cannot see the full state");
          }
        }
      }
      WorldState ws = state_from_observation(data);
      if (is_goal(ws, scenario.goal)) return {};

      Action next{ActionKind::PickUp, "", ""};
      if (ws.gripper.holding) {
        if (!constructive_placement(ws, index, *ws.gripper.holding, next)) {
          return give_up("held block has no constructive placement");
        }
      } else if (!acquire_move(ws, index, next)) {
        return give_up("no constructive move available");
      }
      auto outcome = client.call_execute(next.kind, action_args(next));
      if (!envelope_ok(outcome)) {
        return give_up("action rejected: " + envelope_message(outcome));
      }
    }
    return give_up("round limit reached");
  }

 private:
  static bool constructive_placement(const WorldState& ws,
                                     const GoalIndex& index,
                                     const std::string& block, Action& out) {
    auto below = index.below(block);
    if (!below) return false;
    if (!below->has_value()) {
      if (!ws.first_free_position()) return false;
      out = {ActionKind::PutDown, block, ""};
      return true;
    }
    const std::string& support = **below;
    if (!ws.is_top(support) || !in_position(ws, index, support)) return false;
    out = {ActionKind::Stack, block, support};
    return true;
  }

  static bool acquire_move(const WorldState& ws, const GoalIndex& index,
                           Action& out) {
    for (size_t p = 0; p < ws.positions.size(); ++p) {
      const auto& stack = ws.positions[p];
      if (stack.empty()) continue;
      const std::string& top = stack.back();
      if (in_position(ws, index, top)) continue;

      WorldState after = ws;
      after.positions[p].pop_back();
      after.gripper.holding = top;
      Action placement{ActionKind::PickUp, "", ""};
      if (!constructive_placement(after, index, top, placement)) continue;

      if (stack.size() == 1) {
        out = {ActionKind::PickUp, top, ""};
      } else {
        out = {ActionKind::Unstack, top, stack[stack.size() - 2]};
      }
      return true;
    }
    return false;
  }
};

}  // namespace

std::unique_ptr<Agent> make_agent(const std::string& name) {
  if (name == "oracle") return std::make_unique<OracleAgent>();
  if (name == "reveal") return std::make_unique<RevealAgent>();
  if (name == "greedy") return std::make_unique<GreedyAgent>();
  return nullptr;
}

namespace {

/// Replays the successful log entries from the initial state; the episode is
/// solved when the replayed state satisfies the goal. This consults only the
/// service's public log, so it works identically across transports.
bool judge_solved(SimService& service, const Scenario& scenario) {
  auto env = service.log().body;
  if (!env.value("success", false)) return false;
  WorldState ws = scenario.initial_state();
  for (const auto& entry : env["data"]["entries"]) {
    if (!entry.value("success", false)) continue;
    auto kind = parse_action_kind(entry["action"]["action"].get<std::string>());
    if (!kind) return false;
    Action action{*kind, entry["action"]["block"].get<std::string>(),
                  entry["action"].value("target", "")};
    auto applied = apply_action(ws, action, scenario.constraint_set);
    if (!applied.ok()) return false;
    ws = std::move(applied.value());
  }
  return is_goal(ws, scenario.goal);
}

std::pair<int, int> log_action_counts(SimService& service) {
  auto env = service.log().body;
  int succeeded = 0;
  int failed = 0;
  if (env.value("success", false)) {
    for (const auto& entry : env["data"]["entries"]) {
      if (entry.value("success", false)) {
        ++succeeded;
      } else {
        ++failed;
      }
    }
  }
  return {succeeded, failed};
}

}  // namespace

Result<nlohmann::json, std::string> run_harness(const ScenarioStore& store,
                                                const HarnessConfig& config) {
  SimService service(store, config.phase_delay);

  std::unique_ptr<RestServer> server;
  std::thread server_thread;
  std::string base_url;
  std::unique_ptr<DirectUpstream> upstream;
  std::unique_ptr<McpGateway> gateway;
  std::unique_ptr<ToolClient> client;

  if (config.transport == "direct") {
    client = std::make_unique<DirectClient>(service);
  } else if (config.transport == "rest") {
    server = std::make_unique<RestServer>(service);
    int port = server->bind_any();
    if (port <= 0) return std::string("could not bind a loopback port");
    base_url = "http://127.0.0.1:" + std::to_string(port);
    server_thread = std::thread([&server] { server->run(); });
    client = std::make_unique<RestClient>(base_url);
  } else if (config.transport == "mcp") {
    upstream = std::make_unique<DirectUpstream>(service);
    gateway = std::make_unique<McpGateway>(*upstream);
    client = std::make_unique<McpClient>(*gateway);
  } else {
    return std::string("unknown transport '" + config.transport + "'");
  }

  json episodes = json::array();
  std::map<std::string, std::map<int, json>> summary;

  for (const std::string& agent_name : config.agents) {
    auto agent = make_agent(agent_name);
    if (!agent) {
      if (server) {
        server->stop();
        server_thread.join();
      }
      return std::string("unknown agent '" + agent_name + "'");
    }
    std::vector<int> cats;
    for (int cat : agent->default_categories()) {
      if (std::count(config.categories.begin(), config.categories.end(), cat)) {
        cats.push_back(cat);
      }
    }

    for (const Scenario& scenario : store.all()) {
      if (!std::count(cats.begin(), cats.end(), scenario.category)) continue;

      auto started = service.start(
          {{"scenario_id", scenario.id}, {"force", true}});
      if (!started.body.value("success", false)) {
        if (server) {
          server->stop();
          server_thread.join();
        }
        return std::string("could not start " + scenario.id);
      }

      CountingClient counting(*client);
      auto t0 = std::chrono::steady_clock::now();
      AgentOutcome outcome = agent->run(scenario, counting);
      auto t1 = std::chrono::steady_clock::now();

      bool impossible = !scenario.metadata.min_solution_length.has_value();
      bool solved = judge_solved(service, scenario);
      auto [succeeded, failed] = log_action_counts(service);
      bool correct =
          impossible ? outcome.declared_impossible : solved && !outcome.gave_up;

      json episode{
          {"scenario_id", scenario.id},
          {"category", scenario.category},
          {"agent", agent_name},
          {"solved", solved},
          {"declared_impossible", outcome.declared_impossible},
          {"gave_up", outcome.gave_up},
          {"correct", correct},
          {"tool_calls", counting.total_calls()},
          {"verify_attempts", counting.verify_attempts()},
          {"actions_succeeded", succeeded},
          {"actions_failed", failed},
          {"wall_time_ms",
           std::chrono::duration<double, std::milli>(t1 - t0).count()},
      };
      if (!outcome.note.empty()) episode["note"] = outcome.note;
      episodes.push_back(std::move(episode));

      json& cell = summary[agent_name][scenario.category];
      if (cell.is_null()) {
        cell = {{"episodes", 0}, {"correct", 0},     {"solved", 0},
                {"gave_up", 0},  {"tool_calls", 0},  {"verify_attempts", 0},
                {"declared_impossible", 0}};
      }
      cell["episodes"] = cell["episodes"].get<int>() + 1;
      cell["correct"] = cell["correct"].get<int>() + (correct ? 1 : 0);
      cell["solved"] = cell["solved"].get<int>() + (solved ? 1 : 0);
      cell["gave_up"] = cell["gave_up"].get<int>() + (outcome.gave_up ? 1 : 0);
      cell["declared_impossible"] = cell["declared_impossible"].get<int>() +
                                    (outcome.declared_impossible ? 1 : 0);
      cell["tool_calls"] =
          cell["tool_calls"].get<int>() + counting.total_calls();
      cell["verify_attempts"] =
          cell["verify_attempts"].get<int>() + counting.verify_attempts();

      service.stop();
    }
  }

  if (server) {
    server->stop();
    server_thread.join();
  }

  json summary_json = json::object();
  for (const auto& [agent_name, cats] : summary) {
    json per_cat = json::object();
    for (const auto& [cat, cell] : cats) {
      per_cat["cat" + std::to_string(cat)] = cell;
    }
    summary_json[agent_name] = std::move(per_cat);
  }

  json manifest{{"seed", config.seed},
                {"transport", config.transport},
                {"engine_version", McpGateway::kServerVersion},
                {"protocol_version", McpGateway::kProtocolVersion},
                {"agents", config.agents},
                {"categories", config.categories},
                {"scenarios", static_cast<int>(store.all().size())}};

  return json{{"manifest", std::move(manifest)},
              {"episodes", std::move(episodes)},
              {"summary", std::move(summary_json)}};
}

nlohmann::json strip_wall_times(nlohmann::json doc) {
  if (doc.is_object()) {
    json out = json::object();
    for (auto& [key, value] : doc.items()) {
      if (key.rfind("wall_time", 0) == 0) continue;
      out[key] = strip_wall_times(value);
    }
    return out;
  }
  if (doc.is_array()) {
    json out = json::array();
    for (auto& value : doc) out.push_back(strip_wall_times(value));
    return out;
  }
  return doc;
}

std::string report_markdown(const nlohmann::json& report) {
  std::ostringstream out;
  const json& manifest = report["manifest"];
  out << "# Evaluation report\n\n";
  out << "Transport: " << manifest["transport"].get<std::string>()
      << "; seed: " << manifest["seed"] << "; scenarios: "
      << manifest["scenarios"] << ".\n\n";
  out << "| agent | cat1 | cat2 | cat3 | cat4 | cat5 | overall |\n";
  out << "|-------|------|------|------|------|------|---------|\n";

  std::vector<std::string> warnings;
  for (const auto& agent : manifest["agents"]) {
    std::string name = agent.get<std::string>();
    out << "| " << name << " |";
    int correct = 0;
    int episodes = 0;
    bool any = report["summary"].contains(name);
    for (int cat = 1; cat <= 5; ++cat) {
      std::string key = "cat" + std::to_string(cat);
      if (any && report["summary"][name].contains(key)) {
        const json& cell = report["summary"][name][key];
        out << " " << cell["correct"].get<int>() << "/"
            << cell["episodes"].get<int>() << " |";
        correct += cell["correct"].get<int>();
        episodes += cell["episodes"].get<int>();
      } else {
        out << " - |";
      }
    }
    out << " " << correct << "/" << episodes << " |\n";
    if (episodes == 0) {
      warnings.push_back("agent " + name + " ran no episodes");
    }
  }
  out << "\nCells are correct/episodes; '-' marks categories the agent was "
         "not scored on.\n";
  for (const auto& warning : warnings) {
    out << "\nWarning: " << warning << ".\n";
  }
  return out.str();
}

}  // namespace blocksbench

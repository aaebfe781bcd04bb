#include "blocksbench/mcp_gateway.hpp"

#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "test_util.hpp"

using namespace blocksbench;
using nlohmann::json;

namespace {

ScenarioStore shipped_store() {
  static ScenarioStore store = [] {
    auto loaded = ScenarioStore::load_dir(testutil::scenario_dir());
    REQUIRE(loaded.ok());
    return loaded.value();
  }();
  return store;
}

json request(int id, const std::string& method, json params = json::object()) {
  return {{"jsonrpc", "2.0"}, {"id", id}, {"method", method},
          {"params", std::move(params)}};
}

json must_handle(McpGateway& gateway, const json& message) {
  auto response = gateway.handle_line(message.dump());
  REQUIRE(response.has_value());
  return *response;
}

// sends the initialize handshake the way a host would
void handshake(McpGateway& gateway) {
  auto init = must_handle(
      gateway, request(0, "initialize",
                       {{"protocolVersion", McpGateway::kProtocolVersion},
                        {"capabilities", json::object()},
                        {"clientInfo", {{"name", "test"}, {"version", "0"}}}}));
  REQUIRE(init.contains("result"));
  gateway.handle_line(
      json{{"jsonrpc", "2.0"}, {"method", "notifications/initialized"}}.dump());
}

struct DeadUpstream : Upstream {
  Result<json, std::string> rules() override {
    return std::string("connection refused");
  }
  Result<json, std::string> status() override {
    return std::string("connection refused");
  }
  Result<json, std::string> verify(const json&) override {
    return std::string("connection refused");
  }
  Result<json, std::string> execute(ActionKind, const json&) override {
    return std::string("connection refused");
  }
};

}  // namespace

TEST_CASE("initialize advertises the tool capability and identity") {
  SimService service(shipped_store());
  DirectUpstream upstream(service);
  McpGateway gateway(upstream);

  auto response = must_handle(gateway, request(1, "initialize"));
  CHECK(response["jsonrpc"] == "2.0");
  CHECK(response["id"] == 1);
  const auto& result = response["result"];
  CHECK(result["protocolVersion"] == McpGateway::kProtocolVersion);
  CHECK(result["capabilities"]["tools"].is_object());
  CHECK(result["serverInfo"]["name"] == "blocksbench-mcp");
  CHECK(result["serverInfo"]["version"] == "1.0.0");
}

TEST_CASE("initialize echoes the client's protocol version") {
  SimService service(shipped_store());
  DirectUpstream upstream(service);
  McpGateway gateway(upstream);
  auto response = must_handle(
      gateway, request(1, "initialize", {{"protocolVersion", "2024-11-05"}}));
  CHECK(response["result"]["protocolVersion"] == "2024-11-05");
}

TEST_CASE("tool access before initialization is refused") {
  SimService service(shipped_store());
  DirectUpstream upstream(service);
  McpGateway gateway(upstream);

  for (auto method : {"tools/list", "tools/call"}) {
    auto response = must_handle(gateway, request(2, method));
    CHECK(response["error"]["code"] == -32002);
    CHECK(response["error"]["message"] == "Server not initialized");
  }
}

TEST_CASE("framing errors use the standard codes") {
  SimService service(shipped_store());
  DirectUpstream upstream(service);
  McpGateway gateway(upstream);
  handshake(gateway);

  auto parse_error = gateway.handle_line("{not json");
  REQUIRE(parse_error);
  CHECK((*parse_error)["error"]["code"] == -32700);
  CHECK((*parse_error)["id"].is_null());

  auto wrong_version = must_handle(
      gateway, json{{"jsonrpc", "1.0"}, {"id", 3}, {"method", "ping"}});
  CHECK(wrong_version["error"]["code"] == -32600);

  auto no_method = must_handle(gateway, json{{"jsonrpc", "2.0"}, {"id", 4}});
  CHECK(no_method["error"]["code"] == -32600);

  auto unknown = must_handle(gateway, request(5, "resources/list"));
  CHECK(unknown["error"]["code"] == -32601);

  auto bad_params = must_handle(
      gateway,
      json{{"jsonrpc", "2.0"}, {"id", 6}, {"method", "ping"}, {"params", 7}});
  CHECK(bad_params["error"]["code"] == -32600);
}

TEST_CASE("notifications never get a response") {
  SimService service(shipped_store());
  DirectUpstream upstream(service);
  McpGateway gateway(upstream);
  CHECK(!gateway.handle_line(
      json{{"jsonrpc", "2.0"}, {"method", "notifications/initialized"}}.dump()));
  CHECK(!gateway.handle_line(
      json{{"jsonrpc", "2.0"}, {"method", "anything/else"}}.dump()));
}

TEST_CASE("ping answers an empty result and string ids are echoed") {
  SimService service(shipped_store());
  DirectUpstream upstream(service);
  McpGateway gateway(upstream);
  auto response = must_handle(gateway, json{{"jsonrpc", "2.0"},
                                            {"id", "ping-7"},
                                            {"method", "ping"}});
  CHECK(response["id"] == "ping-7");
  CHECK(response["result"] == json::object());
}

TEST_CASE("tools/list names the seven tools with uniform documentation") {
  SimService service(shipped_store());
  DirectUpstream upstream(service);
  McpGateway gateway(upstream);
  handshake(gateway);

  auto response = must_handle(gateway, request(2, "tools/list"));
  const auto& tools = response["result"]["tools"];
  REQUIRE(tools.size() == 7);

  std::set<std::string> names;
  for (const auto& tool : tools) {
    names.insert(tool["name"].get<std::string>());
    const auto desc = tool["description"].get<std::string>();
    CHECK(desc.find("Arguments:") != std::string::npos);
    CHECK(desc.find("Response:") != std::string::npos);
    CHECK(tool["inputSchema"]["type"] == "object");
  }
  CHECK(names == std::set<std::string>{"get_rules", "get_status",
                                       "verify_plan", "pick_up", "put_down",
                                       "stack", "unstack"});

  for (const auto& tool : tools) {
    auto name = tool["name"].get<std::string>();
    const auto desc = tool["description"].get<std::string>();
    if (name == "pick_up" || name == "put_down" || name == "stack" ||
        name == "unstack") {
      CHECK(desc.find("Preconditions:") != std::string::npos);
      CHECK(desc.find("Effects:") != std::string::npos);
      CHECK(tool["inputSchema"]["required"][0] == "block");
    }
    if (name == "stack") {
      CHECK(desc.find("the robot holds the block and the target block is "
                      "located on top of a stack") != std::string::npos);
      CHECK(tool["inputSchema"]["required"] ==
            json::array({"block", "target"}));
    }
    if (name == "verify_plan") {
      CHECK(tool["inputSchema"]["properties"]["steps"]["type"] == "array");
    }
  }
}

TEST_CASE("tool results mirror the rest payloads") {
  SimService service(shipped_store());
  REQUIRE(service.start({{"scenario_id", "cat1/s01"}}).http_status == 200);
  DirectUpstream upstream(service);
  McpGateway gateway(upstream);
  handshake(gateway);

  auto status = must_handle(
      gateway, request(3, "tools/call", {{"name", "get_status"}}));
  const auto& result = status["result"];
  CHECK(result["isError"] == false);
  CHECK(result["structuredContent"] == service.status().body["data"]);
  CHECK(result["content"][0]["type"] == "text");
  CHECK(json::parse(result["content"][0]["text"].get<std::string>()) ==
        result["structuredContent"]);

  auto rules = must_handle(
      gateway, request(4, "tools/call", {{"name", "get_rules"}}));
  CHECK(rules["result"]["structuredContent"] == service.rules().body["data"]);
}

TEST_CASE("rule violations are tool results, not protocol errors") {
  SimService service(shipped_store());
  REQUIRE(service.start({{"scenario_id", "cat1/s01"}}).http_status == 200);
  DirectUpstream upstream(service);
  McpGateway gateway(upstream);
  handshake(gateway);

  auto response = must_handle(
      gateway, request(5, "tools/call",
                       {{"name", "pick_up"},
                        {"arguments", {{"block", "ZZ"}}}}));
  REQUIRE(response.contains("result"));
  const auto& result = response["result"];
  CHECK(result["isError"] == false);
  CHECK(result["structuredContent"]["rule_id"] == "unknown_block");
  CHECK(result["content"][0]["text"] ==
        result["structuredContent"]["message"]);
}

TEST_CASE("malformed tool calls are invalid-params errors") {
  SimService service(shipped_store());
  REQUIRE(service.start({{"scenario_id", "cat1/s01"}}).http_status == 200);
  DirectUpstream upstream(service);
  McpGateway gateway(upstream);
  handshake(gateway);

  auto no_name = must_handle(gateway, request(6, "tools/call"));
  CHECK(no_name["error"]["code"] == -32602);

  auto unknown = must_handle(
      gateway, request(7, "tools/call", {{"name", "teleport"}}));
  CHECK(unknown["error"]["code"] == -32602);

  auto no_block = must_handle(
      gateway, request(8, "tools/call", {{"name", "pick_up"}}));
  CHECK(no_block["error"]["code"] == -32602);

  auto no_target = must_handle(
      gateway, request(9, "tools/call",
                       {{"name", "stack"}, {"arguments", {{"block", "A"}}}}));
  CHECK(no_target["error"]["code"] == -32602);

  auto stray_target = must_handle(
      gateway,
      request(10, "tools/call",
              {{"name", "put_down"},
               {"arguments", {{"block", "A"}, {"target", "B"}}}}));
  CHECK(stray_target["error"]["code"] == -32602);

  auto bad_steps = must_handle(
      gateway, request(11, "tools/call",
                       {{"name", "verify_plan"},
                        {"arguments", {{"steps", "none"}}}}));
  CHECK(bad_steps["error"]["code"] == -32602);
}

TEST_CASE("verify_plan round trips the verdict") {
  SimService service(shipped_store());
  const auto* scenario = service.store().find("cat1/s01");
  REQUIRE(scenario);
  REQUIRE(service.start({{"scenario_id", "cat1/s01"}}).http_status == 200);
  DirectUpstream upstream(service);
  McpGateway gateway(upstream);
  handshake(gateway);

  auto solved =
      solve(scenario->initial_state(), scenario->goal, scenario->constraint_set);
  auto* plan = std::get_if<Solved>(&solved);
  REQUIRE(plan);
  auto doc = plan_to_json(plan->plan);

  auto response = must_handle(
      gateway, request(12, "tools/call",
                       {{"name", "verify_plan"},
                        {"arguments", {{"steps", doc["steps"]}}}}));
  const auto& verdict = response["result"]["structuredContent"];
  CHECK(verdict["verified"] == true);
  CHECK(verdict["reaches_goal"] == true);
}

TEST_CASE("an unreachable upstream is a transport error") {
  DeadUpstream upstream;
  McpGateway gateway(upstream);
  handshake(gateway);
  auto response = must_handle(
      gateway, request(13, "tools/call", {{"name", "get_status"}}));
  CHECK(response["error"]["code"] == -32000);
  CHECK(response["error"]["message"] ==
        "Upstream unreachable: connection refused");
}

TEST_CASE("the gateway holds no session state") {
  SimService service(shipped_store());
  REQUIRE(service.start({{"scenario_id", "cat1/s01"}}).http_status == 200);
  DirectUpstream upstream(service);

  json before;
  {
    McpGateway first(upstream);
    handshake(first);
    auto pickup = service.store().find("cat1/s01");
    REQUIRE(pickup);
    before = must_handle(
        first, request(1, "tools/call",
                       {{"name", "get_status"}}))["result"]["structuredContent"];
  }

  // a fresh gateway over the same upstream sees the identical session
  McpGateway second(upstream);
  handshake(second);
  auto after = must_handle(
      second, request(1, "tools/call",
                      {{"name", "get_status"}}))["result"]["structuredContent"];
  CHECK(before == after);
}

TEST_CASE("the stdio loop answers one line per request and skips blanks") {
  SimService service(shipped_store());
  DirectUpstream upstream(service);
  McpGateway gateway(upstream);

  std::istringstream in(
      request(1, "initialize").dump() + "\n\n" +
      json{{"jsonrpc", "2.0"}, {"method", "notifications/initialized"}}.dump() +
      "\n" + request(2, "tools/list").dump() + "\n");
  std::ostringstream out;
  CHECK(gateway.run_stdio(in, out) == 0);

  std::istringstream lines(out.str());
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    auto doc = json::parse(line);
    CHECK(doc["jsonrpc"] == "2.0");
    ++count;
  }
  CHECK(count == 2);  // two requests, one notification
}

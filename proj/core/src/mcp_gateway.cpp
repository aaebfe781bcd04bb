#include "blocksbench/mcp_gateway.hpp"

#include <istream>
#include <ostream>

#include "httplib.h"

namespace blocksbench {

namespace {

constexpr int kParseError = -32700;
constexpr int kInvalidRequest = -32600;
constexpr int kMethodNotFound = -32601;
constexpr int kInvalidParams = -32602;
constexpr int kNotInitialized = -32002;
constexpr int kUpstreamUnreachable = -32000;

nlohmann::json rpc_error(const nlohmann::json& id, int code,
                         const std::string& message) {
  return {{"jsonrpc", "2.0"},
          {"id", id},
          {"error", {{"code", code}, {"message", message}}}};
}

nlohmann::json rpc_result(const nlohmann::json& id, nlohmann::json result) {
  return {{"jsonrpc", "2.0"}, {"id", id}, {"result", std::move(result)}};
}

nlohmann::json safe_id(const nlohmann::json& message) {
  if (!message.is_object() || !message.contains("id")) return nullptr;
  const auto& id = message["id"];
  if (id.is_string() || id.is_number() || id.is_null()) return id;
  return nullptr;
}

}  // namespace

HttpUpstream::HttpUpstream(std::string base_url)
    : base_url_(std::move(base_url)) {}

Result<nlohmann::json, std::string> HttpUpstream::get(const std::string& path) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(5, 0);
  auto res = client.Get(path);
  if (!res) {
    return std::string("cannot reach " + base_url_ + path + " (" +
                       httplib::to_string(res.error()) + ")");
  }
  auto body = nlohmann::json::parse(res->body, nullptr, false);
  if (body.is_discarded() || !body.is_object() || !body.contains("success")) {
    return std::string("malformed response from " + base_url_ + path);
  }
  return body;
}

Result<nlohmann::json, std::string> HttpUpstream::post(
    const std::string& path, const nlohmann::json& body) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(5, 0);
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) {
    return std::string("cannot reach " + base_url_ + path + " (" +
                       httplib::to_string(res.error()) + ")");
  }
  auto parsed = nlohmann::json::parse(res->body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object() ||
      !parsed.contains("success")) {
    return std::string("malformed response from " + base_url_ + path);
  }
  return parsed;
}

Result<nlohmann::json, std::string> HttpUpstream::rules() {
  return get("/rules");
}
Result<nlohmann::json, std::string> HttpUpstream::status() {
  return get("/status");
}
Result<nlohmann::json, std::string> HttpUpstream::verify(
    const nlohmann::json& plan) {
  return post("/verify", plan);
}
Result<nlohmann::json, std::string> HttpUpstream::execute(
    ActionKind kind, const nlohmann::json& args) {
  return post("/actions/" + to_string(kind), args);
}

Result<nlohmann::json, std::string> DirectUpstream::rules() {
  return service_.rules().body;
}
Result<nlohmann::json, std::string> DirectUpstream::status() {
  return service_.status().body;
}
Result<nlohmann::json, std::string> DirectUpstream::verify(
    const nlohmann::json& plan) {
  return service_.verify(plan).body;
}
Result<nlohmann::json, std::string> DirectUpstream::execute(
    ActionKind kind, const nlohmann::json& args) {
  return service_.execute(kind, args).body;
}

std::optional<nlohmann::json> McpGateway::handle_line(const std::string& line) {
  auto message = nlohmann::json::parse(line, nullptr, false);
  if (message.is_discarded()) {
    return rpc_error(nullptr, kParseError, "Parse error");
  }
  return handle(message);
}

std::optional<nlohmann::json> McpGateway::handle(const nlohmann::json& message) {
  nlohmann::json id = safe_id(message);
  if (!message.is_object() || !message.contains("jsonrpc") ||
      message["jsonrpc"] != "2.0" || !message.contains("method") ||
      !message["method"].is_string()) {
    return rpc_error(id, kInvalidRequest, "Invalid Request");
  }
  std::string method = message["method"].get<std::string>();
  if (!message.contains("id")) {
    // Notifications (notifications/initialized and friends) get no response.
    return std::nullopt;
  }
  nlohmann::json params = message.contains("params")
                              ? message["params"]
                              : nlohmann::json::object();
  if (!params.is_object()) {
    return rpc_error(id, kInvalidRequest, "params must be an object");
  }

  if (method == "initialize") {
    initialized_ = true;
    nlohmann::json version = kProtocolVersion;
    if (params.contains("protocolVersion") &&
        params["protocolVersion"].is_string()) {
      version = params["protocolVersion"];
    }
    return rpc_result(
        id, {{"protocolVersion", std::move(version)},
             {"capabilities", {{"tools", nlohmann::json::object()}}},
             {"serverInfo",
              {{"name", kServerName}, {"version", kServerVersion}}}});
  }
  if (method == "ping") {
    return rpc_result(id, nlohmann::json::object());
  }
  if (method == "tools/list") {
    if (!initialized_) {
      return rpc_error(id, kNotInitialized, "Server not initialized");
    }
    return rpc_result(id, {{"tools", tool_descriptors()}});
  }
  if (method == "tools/call") {
    if (!initialized_) {
      return rpc_error(id, kNotInitialized, "Server not initialized");
    }
    return call_tool(id, params);
  }
  return rpc_error(id, kMethodNotFound, "Method not found: " + method);
}

nlohmann::json McpGateway::call_tool(const nlohmann::json& id,
                                     const nlohmann::json& params) {
  if (!params.contains("name") || !params["name"].is_string()) {
    return rpc_error(id, kInvalidParams, "tool name is required");
  }
  std::string name = params["name"].get<std::string>();
  nlohmann::json args = params.contains("arguments")
                            ? params["arguments"]
                            : nlohmann::json::object();
  if (!args.is_object()) {
    return rpc_error(id, kInvalidParams, "arguments must be an object");
  }

  auto finish = [&](Result<nlohmann::json, std::string> envelope)
      -> nlohmann::json {
    if (!envelope.ok()) {
      return rpc_error(id, kUpstreamUnreachable,
                       "Upstream unreachable: " + envelope.error());
    }
    const nlohmann::json& body = envelope.value();
    bool success = body.value("success", false);
    const char* key = success ? "data" : "error";
    if (!body.contains(key)) {
      return rpc_error(id, kUpstreamUnreachable,
                       "malformed upstream envelope");
    }
    nlohmann::json payload = body.at(key);
    std::string text =
        success ? payload.dump() : payload.value("message", "");
    nlohmann::json content = nlohmann::json::array();
    content.push_back({{"type", "text"}, {"text", std::move(text)}});
    return rpc_result(id, {{"content", std::move(content)},
                           {"structuredContent", std::move(payload)},
                           {"isError", false}});
  };

  if (name == "get_rules") return finish(upstream_.rules());
  if (name == "get_status") return finish(upstream_.status());
  if (name == "verify_plan") {
    if (!args.contains("steps") || !args["steps"].is_array()) {
      return rpc_error(id, kInvalidParams,
                       "verify_plan requires 'steps' as an array");
    }
    return finish(upstream_.verify({{"steps", args["steps"]}}));
  }

  auto kind = parse_action_kind(name);
  if (!kind) return rpc_error(id, kInvalidParams, "Unknown tool: " + name);
  if (!args.contains("block") || !args["block"].is_string()) {
    return rpc_error(id, kInvalidParams,
                     name + " requires 'block' as a string");
  }
  bool needs_target =
      *kind == ActionKind::Stack || *kind == ActionKind::Unstack;
  nlohmann::json body{{"block", args["block"]}};
  if (needs_target) {
    if (!args.contains("target") || !args["target"].is_string()) {
      return rpc_error(id, kInvalidParams,
                       name + " requires 'target' as a string");
    }
    body["target"] = args["target"];
  } else if (args.contains("target")) {
    return rpc_error(id, kInvalidParams, "'target' is not allowed for " + name);
  }
  return finish(upstream_.execute(*kind, body));
}

int McpGateway::run_stdio(std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto response = handle_line(line);
    if (response) {
      out << response->dump() << "\n";
      out.flush();
    }
  }
  return 0;
}

namespace {

nlohmann::json tool(const char* name, std::string description,
                    nlohmann::json schema) {
  return {{"name", name},
          {"description", std::move(description)},
          {"inputSchema", std::move(schema)}};
}

nlohmann::json empty_schema() {
  return {{"type", "object"}, {"properties", nlohmann::json::object()}};
}

nlohmann::json block_schema(const char* block_doc) {
  return {{"type", "object"},
          {"properties",
           {{"block", {{"type", "string"}, {"description", block_doc}}}}},
          {"required", nlohmann::json::array({"block"})}};
}

nlohmann::json block_target_schema(const char* block_doc,
                                   const char* target_doc) {
  return {{"type", "object"},
          {"properties",
           {{"block", {{"type", "string"}, {"description", block_doc}}},
            {"target", {{"type", "string"}, {"description", target_doc}}}}},
          {"required", nlohmann::json::array({"block", "target"})}};
}

constexpr const char* kOutcomeDoc =
    "Response: a confirmation message and the updated observation, or the "
    "violated rule (rule_id and message) when a precondition fails.";

}  // namespace

nlohmann::json McpGateway::tool_descriptors() {
  nlohmann::json steps_schema{
      {"type", "object"},
      {"properties",
       {{"steps",
         {{"type", "array"},
          {"items",
           {{"type", "object"},
            {"properties",
             {{"action",
               {{"type", "string"},
                {"enum", nlohmann::json::array(
                             {"pick_up", "put_down", "stack", "unstack"})}}},
              {"block", {{"type", "string"}}},
              {"target", {{"type", "string"}}}}},
            {"required", nlohmann::json::array({"action", "block"})}}}}}}},
      {"required", nlohmann::json::array({"steps"})}};

  nlohmann::json tools = nlohmann::json::array();
  tools.push_back(tool(
      "get_rules",
      "Returns the rules of the active session as natural language: the "
      "available actions, the physical constraints of the world, and any "
      "rules specific to the session's constraint set.\n\nArguments: none."
      "\n\nResponse: the constraint set name and the rules text.",
      empty_schema()));
  tools.push_back(tool(
      "get_status",
      "Returns the current observation of the simulation: the stack at each "
      "table position, the visible blocks with their sizes, the gripper "
      "state and phase, and the goal description. Under partial "
      "observability only the top two blocks of each stack are identified; "
      "deeper entries read \"unknown\" and their sizes are withheld.\n\n"
      "Arguments: none.\n\nResponse: the observation object.",
      empty_schema()));
  tools.push_back(tool(
      "verify_plan",
      "Checks a candidate plan against the scenario's initial state without "
      "changing the live session. Steps are simulated in order; the verdict "
      "says whether the whole plan is executable and whether it reaches the "
      "goal, or identifies the first invalid step and the rule it violates."
      "\n\nArguments: steps - the plan as an array of {action, block, "
      "target} objects; target is given exactly for stack and unstack.\n\n"
      "Response: the verification verdict.",
      std::move(steps_schema)));
  tools.push_back(tool(
      "pick_up",
      std::string(
          "Grasps a block and removes it directly from the table surface."
          "\n\nPreconditions: the gripper is empty and the block stands "
          "alone at its table position (a stack of height one).\n\nEffects: "
          "the robot holds the block and its table position becomes free."
          "\n\nArguments: block - the name of the block to pick up.\n\n") +
          kOutcomeDoc,
      block_schema("Name of the block to pick up.")));
  tools.push_back(tool(
      "put_down",
      std::string(
          "Places the held block down at the first available free position "
          "on the table.\n\nPreconditions: the robot holds the named block "
          "and at least one table position is free.\n\nEffects: the block "
          "forms a new stack of height one at the lowest-indexed free "
          "position and the gripper becomes empty.\n\nArguments: block - "
          "the name of the held block.\n\n") +
          kOutcomeDoc,
      block_schema("Name of the held block to put down.")));
  tools.push_back(tool(
      "stack",
      std::string(
          "Places the held block on top of the stack whose topmost block is "
          "the target.\n\nPreconditions: the robot holds the block and the "
          "target block is located on top of a stack. When block sizes are "
          "enforced, only smaller or equally sized blocks can be placed on "
          "larger ones (see get_rules).\n\nEffects: the block rests on the "
          "target and the gripper becomes empty.\n\nArguments: block - the "
          "held block; target - the topmost block of the destination stack."
          "\n\n") +
          kOutcomeDoc,
      block_target_schema("Name of the held block.",
                          "Topmost block of the destination stack.")));
  tools.push_back(tool(
      "unstack",
      std::string(
          "Removes a block from the top of the stack where it sits directly "
          "on the target block.\n\nPreconditions: the gripper is empty, the "
          "block is the topmost block of its stack, and it rests directly "
          "on the target block.\n\nEffects: the robot holds the block and "
          "the target block becomes the topmost block of its stack.\n\n"
          "Arguments: block - the block to remove; target - the block "
          "directly beneath it.\n\n") +
          kOutcomeDoc,
      block_target_schema("Block to remove from the top of its stack.",
                          "Block directly beneath it.")));
  return tools;
}

}  // namespace blocksbench

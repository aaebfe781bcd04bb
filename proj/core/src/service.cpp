#include "blocksbench/service.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"

namespace blocksbench {

nlohmann::json ok_envelope(nlohmann::json data) {
  return {{"success", true}, {"data", std::move(data)}};
}

nlohmann::json error_envelope(std::optional<RuleId> rule_id,
                              const std::string& message) {
  nlohmann::json error{{"message", message}};
  if (rule_id) error["rule_id"] = to_string(*rule_id);
  return {{"success", false}, {"error", std::move(error)}};
}

int default_port() {
  if (const char* env = std::getenv("BLOCKSBENCH_PORT")) {
    int port = std::atoi(env);
    if (port > 0 && port < 65536) return port;
  }
  return 8350;
}

std::string default_url() {
  if (const char* env = std::getenv("BLOCKSBENCH_URL")) return env;
  return "http://127.0.0.1:" + std::to_string(default_port());
}

namespace {

ApiResponse ok(nlohmann::json data) { return {200, ok_envelope(std::move(data))}; }

ApiResponse fail(int status, const std::string& message,
                 std::optional<RuleId> rule_id = std::nullopt) {
  return {status, error_envelope(rule_id, message)};
}

nlohmann::json step_json(const Action& action) {
  nlohmann::json doc{{"action", to_string(action.kind)},
                     {"block", action.block}};
  if (action.kind == ActionKind::Stack || action.kind == ActionKind::Unstack) {
    doc["target"] = action.target;
  }
  return doc;
}

nlohmann::json observation_json(const Observation& obs) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& block : obs.visible_blocks) {
    blocks.push_back({{"name", block.name}, {"size", block.size}});
  }
  nlohmann::json gripper{{"state", obs.gripper.holding ? "holding" : "idle"}};
  if (obs.gripper.holding) gripper["block"] = *obs.gripper.holding;
  return {{"positions", obs.positions},
          {"stacks", obs.stacks},
          {"blocks", std::move(blocks)},
          {"gripper", std::move(gripper)}};
}

std::string success_message(const Action& action, int landing) {
  switch (action.kind) {
    case ActionKind::PickUp: return "Picked up " + action.block + ".";
    case ActionKind::PutDown:
      return "Put down " + action.block + " at position p" +
             std::to_string(landing) + ".";
    case ActionKind::Stack:
      return "Stacked " + action.block + " on " + action.target + ".";
    case ActionKind::Unstack:
      return "Unstacked " + action.block + " from " + action.target + ".";
  }
  return "";
}

int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

SimService::SimService(ScenarioStore store, double phase_delay_seconds)
    : store_(std::move(store)), phase_delay_(phase_delay_seconds) {}

ApiResponse SimService::start(const nlohmann::json& request) {
  if (!request.is_object()) {
    return fail(400, "Request body must be a JSON object.");
  }
  bool force = false;
  if (request.contains("force")) {
    if (!request["force"].is_boolean()) {
      return fail(400, "'force' must be a boolean.");
    }
    force = request["force"].get<bool>();
  }
  bool has_id = request.contains("scenario_id");
  bool has_inline = request.contains("scenario");
  if (has_id == has_inline) {
    return fail(400, "Provide exactly one of 'scenario_id' or 'scenario'.");
  }

  Scenario scenario;
  if (has_id) {
    if (!request["scenario_id"].is_string()) {
      return fail(400, "'scenario_id' must be a string.");
    }
    std::string id = request["scenario_id"].get<std::string>();
    const Scenario* found = store_.find(id);
    if (!found) return fail(404, "Unknown scenario '" + id + "'.");
    scenario = *found;
  } else {
    auto loaded = load_custom_scenario(request["scenario"]);
    if (!loaded.ok()) {
      return fail(400, "Invalid scenario at " + loaded.error().pointer + ": " +
                           loaded.error().message);
    }
    scenario = std::move(loaded.value());
  }

  std::scoped_lock actions(action_mutex_);
  std::unique_lock lock(state_mutex_);
  if (session_ && !force) {
    return fail(409,
                "A session is already running; stop it first or pass "
                "\"force\": true.");
  }
  Session session;
  session.scenario = std::move(scenario);
  session.state = session.scenario.initial_state();
  session.fsm.reset(session.state.gripper.holding);
  session_ = std::move(session);
  nlohmann::json category =
      session_->scenario.category == 0
          ? nlohmann::json("custom")
          : nlohmann::json(session_->scenario.category);
  return ok({{"running", true},
             {"scenario", session_->scenario.id},
             {"category", std::move(category)}});
}

ApiResponse SimService::stop() {
  std::scoped_lock actions(action_mutex_);
  std::unique_lock lock(state_mutex_);
  if (!session_) return fail(409, "No active session.");
  std::string id = session_->scenario.id;
  session_.reset();
  return ok({{"running", false}, {"scenario", id}});
}

ApiResponse SimService::status() const {
  std::shared_lock lock(state_mutex_);
  if (!session_) return fail(409, "No active session.");
  const Session& s = *session_;
  nlohmann::json data =
      observation_json(observe(s.state, s.scenario.constraint_set));
  data["scenario_id"] = s.scenario.id;
  data["constraint_set"] = to_string(s.scenario.constraint_set);
  data["phase"] = to_string(s.fsm.phase());
  data["goal_description"] = s.scenario.goal.description;
  return ok(std::move(data));
}

ApiResponse SimService::rules() const {
  std::shared_lock lock(state_mutex_);
  if (!session_) return fail(409, "No active session.");
  ConstraintSet cs = session_->scenario.constraint_set;
  return ok({{"constraint_set", to_string(cs)},
             {"text", describe_rules(cs, session_->scenario.positions)}});
}

ApiResponse SimService::scenarios() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& scenario : store_.all()) {
    list.push_back({{"id", scenario.id},
                    {"category", scenario.category},
                    {"constraint_set", to_string(scenario.constraint_set)},
                    {"blocks", static_cast<int>(scenario.blocks.size())},
                    {"positions", scenario.positions}});
  }
  return ok({{"scenarios", std::move(list)},
             {"count", static_cast<int>(store_.all().size())}});
}

ApiResponse SimService::execute(ActionKind kind, const nlohmann::json& request) {
  if (!request.is_object()) {
    return fail(400, "Request body must be a JSON object.");
  }
  if (!request.contains("block") || !request["block"].is_string()) {
    return fail(400, "'block' is required and must be a string.");
  }
  Action action{kind, request["block"].get<std::string>(), ""};
  bool needs_target = kind == ActionKind::Stack || kind == ActionKind::Unstack;
  if (needs_target) {
    if (!request.contains("target") || !request["target"].is_string()) {
      return fail(400, "'target' is required and must be a string.");
    }
    action.target = request["target"].get<std::string>();
  } else if (request.contains("target")) {
    return fail(400, "'target' is not allowed for " + to_string(kind) + ".");
  }
  return do_execute(action);
}

ApiResponse SimService::do_execute(const Action& action) {
  std::scoped_lock actions(action_mutex_);
  bool grasp =
      action.kind == ActionKind::PickUp || action.kind == ActionKind::Unstack;

  {
    std::unique_lock lock(state_mutex_);
    if (!session_) return fail(409, "No active session.");
    Session& s = *session_;
    auto violation = validate(s.state, action, s.scenario.constraint_set);
    if (violation) {
      s.entries.push_back({{"index", s.entries.size()},
                           {"ts_ms", now_ms()},
                           {"action", step_json(action)},
                           {"success", false},
                           {"rule_id", to_string(violation->rule_id)},
                           {"message", violation->message}});
      return {200, error_envelope(violation->rule_id, violation->message)};
    }
    auto err = s.fsm.on(grasp ? GripperEvent(GraspStart{action.block})
                              : GripperEvent(ReleaseStart{}));
    if (err) return fail(409, "Gripper phase error: " + err->message);
  }

  // The transient phase (picking/releasing) is visible to status() readers
  // while we sleep; the stacks still show the pre-action layout.
  if (phase_delay_ > 0) {
    std::this_thread::sleep_for(std::chrono::duration<double>(phase_delay_));
  }

  std::unique_lock lock(state_mutex_);
  Session& s = *session_;  // stop() is blocked on action_mutex_, still alive
  int landing = -1;
  if (action.kind == ActionKind::PutDown) {
    landing = s.state.first_free_position().value_or(-1);
  }
  auto applied = apply_action(s.state, action, s.scenario.constraint_set);
  s.state = std::move(applied.value());
  s.fsm.on(grasp ? GripperEvent(GraspDone{}) : GripperEvent(ReleaseDone{}));

  std::string message = success_message(action, landing);
  s.entries.push_back({{"index", s.entries.size()},
                       {"ts_ms", now_ms()},
                       {"action", step_json(action)},
                       {"success", true},
                       {"message", message}});
  nlohmann::json data{{"message", message},
                      {"state", observation_json(observe(
                                    s.state, s.scenario.constraint_set))}};
  return ok(std::move(data));
}

ApiResponse SimService::verify(const nlohmann::json& request) {
  std::shared_lock lock(state_mutex_);
  if (!session_) return fail(409, "No active session.");
  auto parsed = parse_plan_json(request);
  if (!parsed.ok()) {
    return fail(400, "Invalid plan at " + parsed.error().pointer + ": " +
                         parsed.error().message);
  }
  const Session& s = *session_;
  PlanVerdict verdict =
      verify_plan(s.scenario.initial_state(), s.scenario.goal, parsed.value(),
                  s.scenario.constraint_set);
  return ok(verdict_to_json(verdict, parsed.value().steps.size()));
}

ApiResponse SimService::log() const {
  std::shared_lock lock(state_mutex_);
  if (!session_) return fail(409, "No active session.");
  return ok({{"entries", session_->entries},
             {"count", static_cast<int>(session_->entries.size())}});
}

struct RestServer::Impl {
  httplib::Server server;
};

namespace {

void send(httplib::Response& res, const ApiResponse& api) {
  res.status = api.http_status;
  res.set_content(api.body.dump(), "application/json");
}

std::optional<nlohmann::json> body_json(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  auto parsed = nlohmann::json::parse(req.body, nullptr, false);
  if (parsed.is_discarded()) return std::nullopt;
  return parsed;
}

}  // namespace

RestServer::RestServer(SimService& service)
    : service_(service), impl_(std::make_unique<Impl>()) {
  auto& svr = impl_->server;

  auto with_body = [this](auto method) {
    return [this, method](const httplib::Request& req, httplib::Response& res) {
      auto doc = body_json(req);
      if (!doc) {
        send(res, {400, error_envelope(std::nullopt,
                                       "Request body is not valid JSON.")});
        return;
      }
      send(res, method(service_, *doc));
    };
  };

  svr.Post("/simulation/start",
           with_body([](SimService& s, const nlohmann::json& doc) {
             return s.start(doc);
           }));
  svr.Post("/simulation/stop",
           [this](const httplib::Request&, httplib::Response& res) {
             send(res, service_.stop());
           });
  svr.Get("/status", [this](const httplib::Request&, httplib::Response& res) {
    send(res, service_.status());
  });
  svr.Get("/rules", [this](const httplib::Request&, httplib::Response& res) {
    send(res, service_.rules());
  });
  svr.Get("/scenarios",
          [this](const httplib::Request&, httplib::Response& res) {
            send(res, service_.scenarios());
          });
  svr.Get("/log", [this](const httplib::Request&, httplib::Response& res) {
    send(res, service_.log());
  });
  svr.Post("/verify", with_body([](SimService& s, const nlohmann::json& doc) {
             return s.verify(doc);
           }));
  for (ActionKind kind : {ActionKind::PickUp, ActionKind::PutDown,
                          ActionKind::Stack, ActionKind::Unstack}) {
    svr.Post("/actions/" + to_string(kind),
             with_body([kind](SimService& s, const nlohmann::json& doc) {
               return s.execute(kind, doc);
             }));
  }

  svr.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      res.set_content(error_envelope(std::nullopt, "Not found.").dump(),
                      "application/json");
    }
  });
}

RestServer::~RestServer() { stop(); }

int RestServer::bind_any(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool RestServer::run() { return impl_->server.listen_after_bind(); }

bool RestServer::listen(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}

void RestServer::stop() { impl_->server.stop(); }

}  // namespace blocksbench

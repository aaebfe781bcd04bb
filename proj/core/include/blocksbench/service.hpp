#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include "blocksbench/constraints.hpp"
#include "blocksbench/gripper_fsm.hpp"
#include "blocksbench/scenario.hpp"
#include "blocksbench/verifier.hpp"
#include "json.hpp"

namespace blocksbench {

/// HTTP status plus the wire envelope:
///   {"success": true,  "data": ...}
///   {"success": false, "error": {"rule_id"?: ..., "message": ...}}
/// Rule violations are successful HTTP exchanges (200) carrying the error
/// envelope; 4xx is reserved for requests the service cannot interpret or
/// session-state conflicts.
struct ApiResponse {
  int http_status = 200;
  nlohmann::json body;
};

nlohmann::json ok_envelope(nlohmann::json data);
nlohmann::json error_envelope(std::optional<RuleId> rule_id,
                              const std::string& message);

/// 8350, unless BLOCKSBENCH_PORT overrides it.
int default_port();
/// http://127.0.0.1:<default_port()>, unless BLOCKSBENCH_URL overrides it.
std::string default_url();

/// The simulation API at the JSON level, shared by the REST server and the
/// in-process transports. Thread safe: observers take a shared lock, actions
/// are serialized so transient gripper phases stay observable but atomic.
class SimService {
 public:
  explicit SimService(ScenarioStore store, double phase_delay_seconds = 0.0);

  /// {"scenario_id": ...} or {"scenario": {...}} plus optional "force".
  ApiResponse start(const nlohmann::json& request);
  ApiResponse stop();
  ApiResponse status() const;
  ApiResponse rules() const;
  ApiResponse scenarios() const;
  /// {"block": ...} with "target" exactly when the kind requires one.
  ApiResponse execute(ActionKind kind, const nlohmann::json& request);
  /// Verifies {"steps": [...]} against the scenario's initial state.
  ApiResponse verify(const nlohmann::json& request);
  ApiResponse log() const;

  const ScenarioStore& store() const { return store_; }

 private:
  struct Session {
    Scenario scenario;
    WorldState state;
    GripperFsm fsm;
    nlohmann::json entries = nlohmann::json::array();
  };

  ApiResponse do_execute(const Action& action);

  ScenarioStore store_;
  double phase_delay_;
  std::optional<Session> session_;
  mutable std::shared_mutex state_mutex_;  // guards session_ and its contents
  std::mutex action_mutex_;                // one action (incl. delay) at a time
};

/// HTTP front end for a SimService.
class RestServer {
 public:
  explicit RestServer(SimService& service);
  ~RestServer();

  /// Binds an OS-chosen port on `host` and returns it (-1 on failure); serve
  /// with run(). Meant for tests.
  int bind_any(const std::string& host = "127.0.0.1");
  bool run();                                      // blocking
  bool listen(const std::string& host, int port);  // bind + run, blocking
  void stop();

 private:
  SimService& service_;
  struct Impl;  // keeps httplib out of this header
  std::unique_ptr<Impl> impl_;
};

}  // namespace blocksbench

#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "blocksbench/mcp_gateway.hpp"
#include "blocksbench/scenario.hpp"
#include "blocksbench/service.hpp"
#include "json.hpp"

namespace blocksbench {

/// Transport-neutral tool access for scripted agents. Every call returns the
/// wire envelope ({"success": ..., "data"/"error": ...}); transports that do
/// not carry the envelope natively reconstruct it.
class ToolClient {
 public:
  virtual ~ToolClient() = default;
  virtual nlohmann::json call_status() = 0;
  virtual nlohmann::json call_verify(const nlohmann::json& plan) = 0;
  virtual nlohmann::json call_execute(ActionKind kind,
                                      const nlohmann::json& args) = 0;
  virtual std::string transport_name() const = 0;
};

/// Calls the service in process, no wire format involved.
class DirectClient : public ToolClient {
 public:
  explicit DirectClient(SimService& service) : service_(service) {}
  nlohmann::json call_status() override;
  nlohmann::json call_verify(const nlohmann::json& plan) override;
  nlohmann::json call_execute(ActionKind kind,
                              const nlohmann::json& args) override;
  std::string transport_name() const override { return "direct"; }

 private:
  SimService& service_;
};

/// Talks HTTP to a running REST server.
class RestClient : public ToolClient {
 public:
  explicit RestClient(std::string base_url) : base_url_(std::move(base_url)) {}
  nlohmann::json call_status() override;
  nlohmann::json call_verify(const nlohmann::json& plan) override;
  nlohmann::json call_execute(ActionKind kind,
                              const nlohmann::json& args) override;
  std::string transport_name() const override { return "rest"; }

 private:
  std::string base_url_;
};

/// Drives a gateway through real JSON-RPC messages (initialize handshake
/// included), then rebuilds the envelope from each tool result.
class McpClient : public ToolClient {
 public:
  explicit McpClient(McpGateway& gateway);
  nlohmann::json call_status() override;
  nlohmann::json call_verify(const nlohmann::json& plan) override;
  nlohmann::json call_execute(ActionKind kind,
                              const nlohmann::json& args) override;
  std::string transport_name() const override { return "mcp"; }

 private:
  nlohmann::json call(const std::string& tool, nlohmann::json arguments,
                      const char* success_key);
  McpGateway& gateway_;
  int next_id_ = 1;
};

/// Decorator recording call counts; verification attempts count *distinct*
/// submitted plans, so re-sending an identical payload is not a new attempt.
class CountingClient : public ToolClient {
 public:
  explicit CountingClient(ToolClient& inner) : inner_(inner) {}
  nlohmann::json call_status() override;
  nlohmann::json call_verify(const nlohmann::json& plan) override;
  nlohmann::json call_execute(ActionKind kind,
                              const nlohmann::json& args) override;
  std::string transport_name() const override {
    return inner_.transport_name();
  }

  int total_calls() const { return total_; }
  int status_calls() const { return status_; }
  int execute_calls() const { return execute_; }
  int verify_calls() const { return verify_; }
  int verify_attempts() const { return static_cast<int>(payloads_.size()); }

 private:
  ToolClient& inner_;
  int total_ = 0;
  int status_ = 0;
  int execute_ = 0;
  int verify_ = 0;
  std::set<std::string> payloads_;
};

struct AgentOutcome {
  bool declared_impossible = false;
  bool gave_up = false;
  std::string note;
};

/// A scripted policy. The scenario document is handed over as the task
/// definition; which parts an agent may consult is the agent's contract
/// (e.g. the reveal agent ignores the true initial stacks).
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  virtual AgentOutcome run(const Scenario& scenario, ToolClient& client) = 0;
  /// Categories this agent is meant to be scored on.
  virtual std::vector<int> default_categories() const = 0;
};

/// "oracle", "reveal" or "greedy"; nullptr for anything else.
std::unique_ptr<Agent> make_agent(const std::string& name);

struct HarnessConfig {
  std::vector<std::string> agents = {"oracle", "reveal", "greedy"};
  std::vector<int> categories = {1, 2, 3, 4, 5};
  std::string transport = "direct";  // direct | rest | mcp
  uint64_t seed = 0;                 // recorded in the manifest
  double phase_delay = 0.0;
};

/// Runs every selected agent over its share of the store and returns the
/// evaluation report (manifest, per-episode records, per-category summary).
/// Apart from wall_time fields the report is byte-deterministic.
Result<nlohmann::json, std::string> run_harness(const ScenarioStore& store,
                                                const HarnessConfig& config);

/// Removes every key starting with "wall_time", recursively. Two runs of the
/// same configuration compare equal after this.
nlohmann::json strip_wall_times(nlohmann::json doc);

/// Renders the summary as a markdown table (one row per agent, one column
/// per category); categories without episodes are flagged underneath.
std::string report_markdown(const nlohmann::json& report);

}  // namespace blocksbench

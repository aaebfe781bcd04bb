#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "blocksbench/service.hpp"
#include "json.hpp"

namespace blocksbench {

/// Where tool calls go. Implementations return the REST envelope body;
/// a string error means the upstream could not be reached at all (which the
/// gateway surfaces as a JSON-RPC error, not a tool result).
class Upstream {
 public:
  virtual ~Upstream() = default;
  virtual Result<nlohmann::json, std::string> rules() = 0;
  virtual Result<nlohmann::json, std::string> status() = 0;
  virtual Result<nlohmann::json, std::string> verify(
      const nlohmann::json& plan) = 0;
  virtual Result<nlohmann::json, std::string> execute(
      ActionKind kind, const nlohmann::json& args) = 0;
};

/// Talks to a running REST server (BLOCKSBENCH_URL by default).
class HttpUpstream : public Upstream {
 public:
  explicit HttpUpstream(std::string base_url = default_url());

  Result<nlohmann::json, std::string> rules() override;
  Result<nlohmann::json, std::string> status() override;
  Result<nlohmann::json, std::string> verify(const nlohmann::json& plan) override;
  Result<nlohmann::json, std::string> execute(ActionKind kind,
                                              const nlohmann::json& args) override;

 private:
  Result<nlohmann::json, std::string> get(const std::string& path);
  Result<nlohmann::json, std::string> post(const std::string& path,
                                           const nlohmann::json& body);
  std::string base_url_;
};

/// In-process binding, used by tests and the evaluation harness.
class DirectUpstream : public Upstream {
 public:
  explicit DirectUpstream(SimService& service) : service_(service) {}

  Result<nlohmann::json, std::string> rules() override;
  Result<nlohmann::json, std::string> status() override;
  Result<nlohmann::json, std::string> verify(const nlohmann::json& plan) override;
  Result<nlohmann::json, std::string> execute(ActionKind kind,
                                              const nlohmann::json& args) override;

 private:
  SimService& service_;
};

/// Tool gateway speaking JSON-RPC 2.0, one message per line. Exposes seven
/// tools: get_rules, get_status, verify_plan, pick_up, put_down, stack,
/// unstack. Rule violations come back as ordinary tool results carrying the
/// violation payload; only transport and protocol failures use error codes.
class McpGateway {
 public:
  static constexpr const char* kProtocolVersion = "2025-06-18";
  static constexpr const char* kServerName = "blocksbench-mcp";
  static constexpr const char* kServerVersion = "1.0.0";

  explicit McpGateway(Upstream& upstream) : upstream_(upstream) {}

  /// Handles one incoming message; nullopt when no response is due
  /// (notifications).
  std::optional<nlohmann::json> handle_line(const std::string& line);

  /// Newline-delimited JSON-RPC loop until EOF. Returns the exit code.
  int run_stdio(std::istream& in, std::ostream& out);

  /// The static tools/list payload (array of tool descriptors).
  static nlohmann::json tool_descriptors();

 private:
  std::optional<nlohmann::json> handle(const nlohmann::json& message);
  nlohmann::json call_tool(const nlohmann::json& id,
                           const nlohmann::json& params);

  Upstream& upstream_;
  bool initialized_ = false;
};

}  // namespace blocksbench

#pragma once

#include <optional>
#include <string>
#include <variant>

#include "blocksbench/result.hpp"

namespace blocksbench {

enum class GripperPhase { Idle, Picking, Holding, Releasing };

std::string to_string(GripperPhase phase);

struct GraspStart {
  std::string block;
};
struct GraspDone {};
struct ReleaseStart {};
struct ReleaseDone {};

using GripperEvent = std::variant<GraspStart, GraspDone, ReleaseStart, ReleaseDone>;

struct FsmError {
  std::string message;
};

/// Phase plus the block it refers to (empty only in Idle).
struct PhaseState {
  GripperPhase phase = GripperPhase::Idle;
  std::optional<std::string> block;
};

/// The only legal cycle is Idle -> Picking(b) -> Holding(b) -> Releasing(b)
/// -> Idle; any other (state, event) pair is an error.
Result<PhaseState, FsmError> transition(const PhaseState& current,
                                        const GripperEvent& event);

/// Stateful wrapper owned by the simulation service.
class GripperFsm {
 public:
  GripperPhase phase() const { return state_.phase; }
  const std::optional<std::string>& block() const { return state_.block; }

  std::optional<FsmError> on(const GripperEvent& event);
  void reset(std::optional<std::string> holding = std::nullopt);

 private:
  PhaseState state_;
};

}  // namespace blocksbench

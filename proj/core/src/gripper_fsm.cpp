#include "blocksbench/gripper_fsm.hpp"

namespace blocksbench {

std::string to_string(GripperPhase phase) {
  switch (phase) {
    case GripperPhase::Idle: return "idle";
    case GripperPhase::Picking: return "picking";
    case GripperPhase::Holding: return "holding";
    case GripperPhase::Releasing: return "releasing";
  }
  return "idle";
}

namespace {

std::string event_name(const GripperEvent& event) {
  if (std::holds_alternative<GraspStart>(event)) return "GraspStart";
  if (std::holds_alternative<GraspDone>(event)) return "GraspDone";
  if (std::holds_alternative<ReleaseStart>(event)) return "ReleaseStart";
  return "ReleaseDone";
}

}  // namespace

Result<PhaseState, FsmError> transition(const PhaseState& current,
                                        const GripperEvent& event) {
  switch (current.phase) {
    case GripperPhase::Idle:
      if (auto* start = std::get_if<GraspStart>(&event)) {
        return PhaseState{GripperPhase::Picking, start->block};
      }
      break;
    case GripperPhase::Picking:
      if (std::holds_alternative<GraspDone>(event)) {
        return PhaseState{GripperPhase::Holding, current.block};
      }
      break;
    case GripperPhase::Holding:
      if (std::holds_alternative<ReleaseStart>(event)) {
        return PhaseState{GripperPhase::Releasing, current.block};
      }
      break;
    case GripperPhase::Releasing:
      if (std::holds_alternative<ReleaseDone>(event)) {
        return PhaseState{GripperPhase::Idle, std::nullopt};
      }
      break;
  }
  return FsmError{"invalid gripper transition: " + event_name(event) +
                  " in phase " + to_string(current.phase)};
}

std::optional<FsmError> GripperFsm::on(const GripperEvent& event) {
  auto next = transition(state_, event);
  if (!next.ok()) return next.error();
  state_ = next.value();
  return std::nullopt;
}

void GripperFsm::reset(std::optional<std::string> holding) {
  if (holding) {
    state_ = PhaseState{GripperPhase::Holding, std::move(holding)};
  } else {
    state_ = PhaseState{};
  }
}

}  // namespace blocksbench

#include "blocksbench/domain.hpp"

#include <algorithm>
#include <sstream>

namespace blocksbench {

std::string to_string(ConstraintSet cs) {
  switch (cs) {
    case ConstraintSet::Base: return "base";
    case ConstraintSet::BlockSize: return "block_size";
    case ConstraintSet::PartialObservability: return "partial_observability";
  }
  return "base";
}

std::optional<ConstraintSet> parse_constraint_set(const std::string& s) {
  if (s == "base") return ConstraintSet::Base;
  if (s == "block_size") return ConstraintSet::BlockSize;
  if (s == "partial_observability") return ConstraintSet::PartialObservability;
  return std::nullopt;
}

std::string to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::PickUp: return "pick_up";
    case ActionKind::PutDown: return "put_down";
    case ActionKind::Stack: return "stack";
    case ActionKind::Unstack: return "unstack";
  }
  return "pick_up";
}

std::optional<ActionKind> parse_action_kind(const std::string& s) {
  if (s == "pick_up") return ActionKind::PickUp;
  if (s == "put_down") return ActionKind::PutDown;
  if (s == "stack") return ActionKind::Stack;
  if (s == "unstack") return ActionKind::Unstack;
  return std::nullopt;
}

std::string to_string(RuleId id) {
  switch (id) {
    case RuleId::GripperOccupied: return "gripper_occupied";
    case RuleId::GripperEmpty: return "gripper_empty";
    case RuleId::HeldMismatch: return "held_mismatch";
    case RuleId::UnknownBlock: return "unknown_block";
    case RuleId::BlockNotClear: return "block_not_clear";
    case RuleId::BlockNotOnTable: return "block_not_on_table";
    case RuleId::NotOnTarget: return "not_on_target";
    case RuleId::NoFreePosition: return "no_free_position";
    case RuleId::SizeOrder: return "size_order";
    case RuleId::Malformed: return "malformed";
  }
  return "malformed";
}

int WorldState::block_size(const std::string& name) const {
  auto it = blocks.find(name);
  return it == blocks.end() ? 1 : it->second.size;
}

std::optional<std::pair<int, int>> WorldState::locate(
    const std::string& name) const {
  for (int p = 0; p < static_cast<int>(positions.size()); ++p) {
    const auto& stack = positions[p];
    for (int h = 0; h < static_cast<int>(stack.size()); ++h) {
      if (stack[h] == name) return std::make_pair(p, h);
    }
  }
  return std::nullopt;
}

bool WorldState::is_top(const std::string& name) const {
  auto loc = locate(name);
  if (!loc) return false;
  return loc->second + 1 == static_cast<int>(positions[loc->first].size());
}

std::optional<int> WorldState::first_free_position() const {
  for (int p = 0; p < static_cast<int>(positions.size()); ++p) {
    if (positions[p].empty()) return p;
  }
  return std::nullopt;
}

namespace {

std::optional<ActionError> check_names(const WorldState& state,
                                       const Action& action) {
  if (!state.blocks.count(action.block)) {
    return ActionError{RuleId::UnknownBlock, "No block named '" + action.block +
                                                 "' exists in this scenario."};
  }
  if ((action.kind == ActionKind::Stack ||
       action.kind == ActionKind::Unstack) &&
      !state.blocks.count(action.target)) {
    return ActionError{RuleId::UnknownBlock, "No block named '" +
                                                 action.target +
                                                 "' exists in this scenario."};
  }
  return std::nullopt;
}

}  // namespace

std::optional<ActionError> check_action(const WorldState& state,
                                        const Action& action,
                                        ConstraintSet cs) {
  if (auto err = check_names(state, action)) return err;

  const auto& held = state.gripper.holding;
  const std::string& b = action.block;
  const std::string& t = action.target;

  switch (action.kind) {
    case ActionKind::PickUp: {
      if (held) {
        return ActionError{RuleId::GripperOccupied,
                           "The gripper is already holding " + *held + "."};
      }
      if (!state.is_top(b)) {
        return ActionError{RuleId::BlockNotClear,
                           "Cannot pick up " + b + ": " + b +
                               " is not the topmost block of its stack."};
      }
      if (state.locate(b)->second != 0) {
        return ActionError{RuleId::BlockNotOnTable,
                           "Cannot pick up " + b + ": " + b +
                               " is not directly on the table."};
      }
      return std::nullopt;
    }
    case ActionKind::Unstack: {
      if (held) {
        return ActionError{RuleId::GripperOccupied,
                           "The gripper is already holding " + *held + "."};
      }
      if (!state.is_top(b)) {
        return ActionError{RuleId::BlockNotClear,
                           "Cannot unstack " + b + ": " + b +
                               " is not the topmost block of its stack."};
      }
      auto loc = *state.locate(b);
      if (loc.second == 0 || state.positions[loc.first][loc.second - 1] != t) {
        return ActionError{RuleId::NotOnTarget, "Cannot unstack " + b +
                                                    " from " + t + ": " + b +
                                                    " is not on top of " + t +
                                                    "."};
      }
      return std::nullopt;
    }
    case ActionKind::PutDown: {
      if (!held) {
        return ActionError{RuleId::GripperEmpty,
                           "The gripper is not holding any block."};
      }
      if (*held != b) {
        return ActionError{RuleId::HeldMismatch, "The gripper is holding " +
                                                     *held + ", not " + b +
                                                     "."};
      }
      if (!state.first_free_position()) {
        return ActionError{RuleId::NoFreePosition,
                           "Cannot put down " + b +
                               ": no free table position remains."};
      }
      return std::nullopt;
    }
    case ActionKind::Stack: {
      if (!held) {
        return ActionError{RuleId::GripperEmpty,
                           "The gripper is not holding any block."};
      }
      if (*held != b) {
        return ActionError{RuleId::HeldMismatch, "The gripper is holding " +
                                                     *held + ", not " + b +
                                                     "."};
      }
      if (t == b) {
        return ActionError{RuleId::NotOnTarget,
                           "Cannot stack " + b + " onto itself."};
      }
      if (!state.is_top(t)) {
        return ActionError{RuleId::BlockNotClear,
                           "Cannot stack " + b + " on " + t + ": " + t +
                               " is not the topmost block of its stack."};
      }
      if (cs == ConstraintSet::BlockSize &&
          state.block_size(b) > state.block_size(t)) {
        std::ostringstream msg;
        msg << "Cannot stack " << b << " (size " << state.block_size(b)
            << ") on " << t << " (size " << state.block_size(t)
            << "): only smaller or equally sized blocks can be placed on "
               "larger ones.";
        return ActionError{RuleId::SizeOrder, msg.str()};
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

Result<WorldState, ActionError> apply_action(const WorldState& state,
                                             const Action& action,
                                             ConstraintSet cs) {
  if (auto err = check_action(state, action, cs)) return *err;

  WorldState next = state;
  switch (action.kind) {
    case ActionKind::PickUp:
    case ActionKind::Unstack: {
      auto loc = *next.locate(action.block);
      next.positions[loc.first].pop_back();
      next.gripper.holding = action.block;
      break;
    }
    case ActionKind::PutDown: {
      next.positions[*next.first_free_position()].push_back(action.block);
      next.gripper.holding.reset();
      break;
    }
    case ActionKind::Stack: {
      auto loc = *next.locate(action.target);
      next.positions[loc.first].push_back(action.block);
      next.gripper.holding.reset();
      break;
    }
  }
  return next;
}

bool is_goal(const WorldState& state, const GoalSpec& goal) {
  if (state.gripper.holding) return false;
  std::vector<std::vector<std::string>> built;
  for (const auto& stack : state.positions) {
    if (!stack.empty()) built.push_back(stack);
  }
  std::vector<std::vector<std::string>> wanted = goal.stacks;
  std::sort(built.begin(), built.end());
  std::sort(wanted.begin(), wanted.end());
  return built == wanted;
}

GoalIndex::GoalIndex(const GoalSpec& goal) {
  for (const auto& stack : goal.stacks) {
    std::optional<std::string> prev;
    for (const auto& name : stack) {
      below_[name] = prev;
      prev = name;
    }
  }
}

bool GoalIndex::contains(const std::string& name) const {
  return below_.count(name) > 0;
}

std::optional<std::optional<std::string>> GoalIndex::below(
    const std::string& name) const {
  auto it = below_.find(name);
  if (it == below_.end()) return std::nullopt;
  return it->second;
}

bool in_position(const WorldState& state, const GoalIndex& index,
                 const std::string& name) {
  if (state.gripper.holding == name) return false;
  auto loc = state.locate(name);
  if (!loc) return false;
  const auto& stack = state.positions[loc->first];
  std::string cur = name;
  int h = loc->second;
  while (true) {
    auto req = index.below(cur);
    if (!req) return false;  // block does not appear in the goal
    if (!req->has_value()) return h == 0;
    if (h == 0 || stack[h - 1] != **req) return false;
    cur = stack[--h];
  }
}

int misplaced_count(const WorldState& state, const GoalIndex& index) {
  int count = 0;
  for (const auto& [name, block] : state.blocks) {
    (void)block;
    if (!in_position(state, index, name)) ++count;
  }
  return count;
}

bool is_constructive(const WorldState& before, const Action& action,
                     const GoalIndex& index) {
  if (action.kind != ActionKind::PutDown && action.kind != ActionKind::Stack) {
    return false;
  }
  auto next = apply_action(before, action, ConstraintSet::Base);
  if (!next.ok()) return false;
  return in_position(next.value(), index, action.block);
}

std::string render_ascii(const WorldState& state) {
  size_t width = 4;
  for (const auto& [name, block] : state.blocks) {
    (void)block;
    width = std::max(width, name.size() + 2);
  }
  size_t height = 1;
  for (const auto& stack : state.positions) {
    height = std::max(height, stack.size());
  }

  auto cell = [&](const std::string& text) {
    std::string out = text;
    while (out.size() < width) {
      out += ' ';
      if (out.size() < width) out.insert(out.begin(), ' ');
    }
    return out;
  };

  std::ostringstream out;
  for (size_t row = height; row-- > 0;) {
    for (const auto& stack : state.positions) {
      out << cell(row < stack.size() ? "[" + stack[row] + "]" : "");
      out << ' ';
    }
    out << '\n';
  }
  for (size_t p = 0; p < state.positions.size(); ++p) {
    out << cell("p" + std::to_string(p)) << ' ';
  }
  out << '\n';
  out << "gripper: "
      << (state.gripper.holding ? "holding " + *state.gripper.holding
                                : "empty")
      << '\n';
  out << "blocks:";
  for (const auto& [name, block] : state.blocks) {
    out << ' ' << name << "(" << block.size << ")";
  }
  out << '\n';
  return out.str();
}

}  // namespace blocksbench

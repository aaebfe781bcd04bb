#include "blocksbench/constraints.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace blocksbench {

std::optional<Violation> validate(const WorldState& state, const Action& action,
                                  ConstraintSet cs) {
  if (auto err = check_action(state, action, cs)) {
    return Violation{err->rule_id, err->message, action};
  }
  return std::nullopt;
}

Observation observe(const WorldState& state, ConstraintSet cs) {
  Observation obs;
  obs.positions = static_cast<int>(state.positions.size());
  obs.gripper = state.gripper;

  std::set<std::string> visible;
  if (state.gripper.holding) visible.insert(*state.gripper.holding);

  for (const auto& stack : state.positions) {
    auto& out = obs.stacks.emplace_back();
    for (size_t h = 0; h < stack.size(); ++h) {
      bool hidden = cs == ConstraintSet::PartialObservability &&
                    h + 2 < stack.size();
      if (hidden) {
        out.push_back(kUnknownName);
      } else {
        out.push_back(stack[h]);
        visible.insert(stack[h]);
      }
    }
  }

  for (const auto& [name, block] : state.blocks) {
    if (visible.count(name)) obs.visible_blocks.push_back(block);
  }
  std::sort(obs.visible_blocks.begin(), obs.visible_blocks.end(),
            [](const Block& a, const Block& b) { return a.name < b.name; });
  return obs;
}

std::string describe_rules(ConstraintSet cs, int positions) {
  std::ostringstream out;
  out << "Blocksworld domain with " << positions
      << " discrete table positions. A robotic gripper manipulates named "
         "blocks that are arranged in stacks; stacks are described bottom to "
         "top.\n\n";
  out << "Available actions:\n"
      << "- pick_up(block_x): Grasps block x and removes it directly from the "
         "table surface.\n"
      << "- put_down(block_x): Places the currently held block x onto an "
         "unoccupied table position.\n"
      << "- stack(block_x, block_y): Places the currently held block x on top "
         "of another block y.\n"
      << "- unstack(block_x, block_y): Grasps block x and removes it from the "
         "top of another block y.\n\n";
  out << "Rules:\n"
      << "1. Only one block can be manipulated by the robotic gripper at a "
         "time.\n"
      << "2. A block can only be grasped if no other block rests on top of "
         "it.\n"
      << "3. Each block can have at most one block directly on top of it.\n"
      << "4. The table surface is restricted to " << positions
      << " discrete positions, and only one stack of blocks can be placed at "
         "each position.\n";
  if (cs == ConstraintSet::BlockSize) {
    out << "5. Blocks have sizes, and only smaller or equally sized blocks "
           "can be placed on larger ones.\n";
  }
  if (cs == ConstraintSet::PartialObservability) {
    out << "5. Only the names of the top two blocks in a stack are visible; "
           "all other blocks are marked as unknown. Hidden blocks still obey "
           "every rule above.\n";
  }
  return out.str();
}

}  // namespace blocksbench

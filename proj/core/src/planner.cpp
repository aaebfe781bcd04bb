#include "blocksbench/planner.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <limits>
#include <string_view>
#include <unordered_map>

namespace blocksbench {

namespace {

constexpr int kTable = -1;
constexpr int kNotInGoal = -2;
constexpr uint8_t kSep = 0xFE;
constexpr uint8_t kNoneHeld = 0xFF;

struct Move {
  ActionKind kind;
  uint8_t block = 0;
  uint8_t target = 0;
};

/// Search-side state over block ids; stacks are kept lexicographically
/// sorted, which canonicalizes away table-position symmetry.
struct IdState {
  std::vector<std::vector<uint8_t>> stacks;  // nonempty only
  int held = -1;
};

struct Ctx {
  std::vector<std::string> names;  // id -> name
  std::vector<int> sizes;          // id -> size
  std::vector<int> goal_below;     // id -> supporting id, kTable or kNotInGoal
  int positions = 0;
  ConstraintSet cs = ConstraintSet::Base;
  std::string goal_key;
};

void sort_stacks(IdState& s) { std::sort(s.stacks.begin(), s.stacks.end()); }

std::string encode(const IdState& s) {
  std::string key;
  key.reserve(32);
  for (const auto& stack : s.stacks) {
    key.append(reinterpret_cast<const char*>(stack.data()), stack.size());
    key.push_back(static_cast<char>(kSep));
  }
  key.push_back(
      static_cast<char>(s.held < 0 ? kNoneHeld : static_cast<uint8_t>(s.held)));
  return key;
}

IdState decode(std::string_view key) {
  IdState s;
  std::vector<uint8_t> stack;
  for (size_t i = 0; i + 1 < key.size(); ++i) {
    uint8_t byte = static_cast<uint8_t>(key[i]);
    if (byte == kSep) {
      s.stacks.push_back(stack);
      stack.clear();
    } else {
      stack.push_back(byte);
    }
  }
  uint8_t held = static_cast<uint8_t>(key.back());
  s.held = held == kNoneHeld ? -1 : held;
  return s;
}

int misplaced(const Ctx& ctx, const IdState& s) {
  int placed = 0;
  for (const auto& stack : s.stacks) {
    bool chain = true;
    for (size_t h = 0; h < stack.size(); ++h) {
      int want = ctx.goal_below[stack[h]];
      chain = chain && (h == 0 ? want == kTable
                               : want == static_cast<int>(stack[h - 1]));
      if (chain) ++placed;
    }
  }
  return static_cast<int>(ctx.names.size()) - placed;
}

template <class Fn>
void for_each_successor(const Ctx& ctx, const IdState& s, Fn&& fn) {
  int free_slots = ctx.positions - static_cast<int>(s.stacks.size());
  if (s.held < 0) {
    for (size_t i = 0; i < s.stacks.size(); ++i) {
      const auto& stack = s.stacks[i];
      uint8_t top = stack.back();
      IdState next = s;
      if (stack.size() == 1) {
        next.stacks.erase(next.stacks.begin() + i);
        next.held = top;
        fn(Move{ActionKind::PickUp, top, 0}, std::move(next));
      } else {
        next.stacks[i].pop_back();
        next.held = top;
        sort_stacks(next);
        fn(Move{ActionKind::Unstack, top, stack[stack.size() - 2]},
           std::move(next));
      }
    }
  } else {
    uint8_t held = static_cast<uint8_t>(s.held);
    if (free_slots > 0) {
      IdState next = s;
      next.stacks.push_back({held});
      next.held = -1;
      sort_stacks(next);
      fn(Move{ActionKind::PutDown, held, 0}, std::move(next));
    }
    for (size_t i = 0; i < s.stacks.size(); ++i) {
      uint8_t top = s.stacks[i].back();
      if (ctx.cs == ConstraintSet::BlockSize &&
          ctx.sizes[held] > ctx.sizes[top]) {
        continue;
      }
      IdState next = s;
      next.stacks[i].push_back(held);
      next.held = -1;
      sort_stacks(next);
      fn(Move{ActionKind::Stack, held, top}, std::move(next));
    }
  }
}

Action to_action(const Ctx& ctx, const Move& move) {
  Action a;
  a.kind = move.kind;
  a.block = ctx.names[move.block];
  if (move.kind == ActionKind::Stack || move.kind == ActionKind::Unstack) {
    a.target = ctx.names[move.target];
  }
  return a;
}

struct Setup {
  Ctx ctx;
  IdState initial;
  // Static impossibility explanation when the goal is provably out of reach
  // without any search (capacity, coverage, size ordering).
  bool statically_impossible = false;
};

Setup prepare(const WorldState& initial, const GoalSpec& goal,
              ConstraintSet cs, bool allow_static) {
  Setup setup;
  Ctx& ctx = setup.ctx;
  ctx.cs = cs;
  ctx.positions = static_cast<int>(initial.positions.size());
  for (const auto& [name, block] : initial.blocks) {
    ctx.names.push_back(name);
  }
  std::sort(ctx.names.begin(), ctx.names.end());
  std::unordered_map<std::string, uint8_t> id_of;
  for (size_t i = 0; i < ctx.names.size(); ++i) {
    id_of[ctx.names[i]] = static_cast<uint8_t>(i);
  }
  ctx.sizes.resize(ctx.names.size(), 1);
  for (const auto& [name, block] : initial.blocks) {
    ctx.sizes[id_of[name]] = block.size;
  }

  ctx.goal_below.assign(ctx.names.size(), kNotInGoal);
  IdState goal_state;
  size_t goal_blocks = 0;
  for (const auto& stack : goal.stacks) {
    std::vector<uint8_t> ids;
    int prev = kTable;
    for (const auto& name : stack) {
      auto it = id_of.find(name);
      if (it == id_of.end()) {
        setup.statically_impossible = true;
        continue;
      }
      ctx.goal_below[it->second] = prev;
      prev = it->second;
      ids.push_back(it->second);
      ++goal_blocks;
    }
    if (!ids.empty()) goal_state.stacks.push_back(std::move(ids));
  }
  sort_stacks(goal_state);
  ctx.goal_key = encode(goal_state);

  if (allow_static) {
    if (static_cast<int>(goal.stacks.size()) > ctx.positions) {
      setup.statically_impossible = true;
    }
    if (goal_blocks != ctx.names.size()) setup.statically_impossible = true;
    for (size_t id = 0; id < ctx.names.size(); ++id) {
      if (ctx.goal_below[id] == kNotInGoal) setup.statically_impossible = true;
      if (cs == ConstraintSet::BlockSize && ctx.goal_below[id] >= 0 &&
          ctx.sizes[id] > ctx.sizes[ctx.goal_below[id]]) {
        setup.statically_impossible = true;
      }
    }
  }

  IdState& s = setup.initial;
  for (const auto& stack : initial.positions) {
    if (stack.empty()) continue;
    std::vector<uint8_t> ids;
    for (const auto& name : stack) ids.push_back(id_of.at(name));
    s.stacks.push_back(std::move(ids));
  }
  sort_stacks(s);
  s.held = initial.gripper.holding ? id_of.at(*initial.gripper.holding) : -1;
  return setup;
}

SolveResult bfs(const Ctx& ctx, const IdState& initial,
                const SearchLimits& limits) {
  struct Node {
    std::string key;
    int parent;
    Move move;
    int depth;
  };
  std::deque<Node> arena;
  std::unordered_map<std::string_view, int> seen;

  auto extract = [&](int idx) {
    Plan plan;
    for (int i = idx; i > 0; i = arena[i].parent) {
      plan.steps.push_back(to_action(ctx, arena[i].move));
    }
    std::reverse(plan.steps.begin(), plan.steps.end());
    return plan;
  };

  std::string root_key = encode(initial);
  if (root_key == ctx.goal_key) return Solved{Plan{}, true};
  arena.push_back({std::move(root_key), -1, Move{}, 0});
  seen.emplace(arena.back().key, 0);

  for (size_t i = 0; i < arena.size(); ++i) {
    if (arena[i].depth >= limits.max_depth) {
      return ResourceLimit{seen.size(), arena[i].depth};
    }
    IdState state = decode(arena[i].key);
    std::optional<SolveResult> out;
    for_each_successor(ctx, state, [&](Move move, IdState next) {
      if (out) return;
      std::string key = encode(next);
      if (seen.count(key)) return;
      if (seen.size() >= limits.max_states) {
        out = ResourceLimit{seen.size(), arena[i].depth + 1};
        return;
      }
      arena.push_back({std::move(key), static_cast<int>(i), move,
                       arena[i].depth + 1});
      seen.emplace(arena.back().key, static_cast<int>(arena.size()) - 1);
      if (arena.back().key == ctx.goal_key) {
        out = Solved{extract(static_cast<int>(arena.size()) - 1), true};
      }
    });
    if (out) return *out;
  }
  return Unsolvable{seen.size()};
}

struct IdaSearch {
  const Ctx& ctx;
  const SearchLimits& limits;
  std::unordered_map<std::string, int> contour_seen;  // key -> best g
  std::vector<Move> path;
  uint64_t expanded = 0;
  int next_bound = std::numeric_limits<int>::max();
  bool over_budget = false;

  // Returns true when a goal was found at exactly f <= bound.
  bool dfs(const IdState& state, const std::string& key, int g, int bound) {
    if (key == ctx.goal_key) return true;
    if (++expanded > limits.max_states) {
      over_budget = true;
      return false;
    }
    bool found = false;
    for_each_successor(ctx, state, [&](Move move, IdState next) {
      if (found || over_budget) return;
      int f = g + 1 + misplaced(ctx, next);
      if (f > bound) {
        next_bound = std::min(next_bound, f);
        return;
      }
      std::string next_key = encode(next);
      auto [it, fresh] = contour_seen.try_emplace(next_key, g + 1);
      if (!fresh) {
        if (it->second <= g + 1) return;
        it->second = g + 1;
      }
      path.push_back(move);
      if (dfs(next, next_key, g + 1, bound)) {
        found = true;
        return;
      }
      path.pop_back();
    });
    return found;
  }
};

SolveResult ida_star(const Ctx& ctx, const IdState& initial,
                     const SearchLimits& limits) {
  std::string root_key = encode(initial);
  if (root_key == ctx.goal_key) return Solved{Plan{}, true};

  int bound = misplaced(ctx, initial);
  uint64_t total_expanded = 0;
  while (bound <= limits.max_depth) {
    IdaSearch search{ctx, limits};
    search.expanded = total_expanded;
    search.contour_seen.emplace(root_key, 0);
    if (search.dfs(initial, root_key, 0, bound)) {
      Plan plan;
      for (const auto& move : search.path) {
        plan.steps.push_back(to_action(ctx, move));
      }
      return Solved{std::move(plan), true};
    }
    total_expanded = search.expanded;
    if (search.over_budget) {
      return ResourceLimit{total_expanded, bound};
    }
    if (search.next_bound == std::numeric_limits<int>::max()) {
      // No state anywhere exceeded the bound: the reachable set is closed
      // and contains no goal.
      return Unsolvable{search.contour_seen.size()};
    }
    bound = search.next_bound;
  }
  return ResourceLimit{total_expanded, limits.max_depth};
}

}  // namespace

SolveResult solve(const WorldState& initial, const GoalSpec& goal,
                  ConstraintSet cs, const SearchLimits& limits) {
  Setup setup = prepare(initial, goal, cs, !limits.require_closure);
  if (setup.statically_impossible) return Unsolvable{0};
  bool small = setup.ctx.names.size() <= 8;
  if (small || limits.require_closure) {
    return bfs(setup.ctx, setup.initial, limits);
  }
  return ida_star(setup.ctx, setup.initial, limits);
}

LengthResult min_solution_length(const WorldState& initial,
                                 const GoalSpec& goal, ConstraintSet cs,
                                 const SearchLimits& limits) {
  SolveResult result = solve(initial, goal, cs, limits);
  if (const auto* solved = std::get_if<Solved>(&result)) {
    return static_cast<int>(solved->plan.steps.size());
  }
  if (const auto* impossible = std::get_if<Unsolvable>(&result)) {
    return *impossible;
  }
  return std::get<ResourceLimit>(result);
}

Result<PlanStats, Rejected> plan_stats(const WorldState& initial,
                                       const GoalSpec& goal, ConstraintSet cs,
                                       const Plan& plan) {
  PlanVerdict verdict = verify_plan(initial, goal, plan, cs);
  if (const auto* rejected = std::get_if<Rejected>(&verdict)) {
    return *rejected;
  }
  GoalIndex index(goal);
  PlanStats stats;
  WorldState state = initial;
  for (const auto& action : plan.steps) {
    if (is_constructive(state, action, index)) {
      ++stats.constructive;
    } else {
      ++stats.non_constructive;
    }
    state = apply_action(state, action, cs).value();
  }
  stats.length = static_cast<int>(plan.steps.size());
  return stats;
}

namespace {

/// Bookkeeping for the staged builder: applies actions, tracks the plan.
struct StagedRun {
  WorldState state;
  ConstraintSet cs;
  Plan plan;
  bool failed = false;

  void do_action(const Action& action) {
    if (failed) return;
    auto next = apply_action(state, action, cs);
    if (!next.ok()) {
      failed = true;
      return;
    }
    state = std::move(next.value());
    plan.steps.push_back(action);
  }

  void acquire(const std::string& name) {
    auto loc = state.locate(name);
    if (!loc) {
      failed = true;
      return;
    }
    if (loc->second == 0) {
      do_action({ActionKind::PickUp, name, ""});
    } else {
      do_action(
          {ActionKind::Unstack, name, state.positions[loc->first][loc->second - 1]});
    }
  }

  // Places the held block anywhere except the listed positions; prefers a
  // free position, then the lowest-indexed allowed stack top that accepts it.
  void dump_held(const std::vector<int>& forbidden) {
    if (failed || !state.gripper.holding) {
      failed = true;
      return;
    }
    const std::string held = *state.gripper.holding;
    if (auto free = state.first_free_position()) {
      if (std::find(forbidden.begin(), forbidden.end(), *free) ==
          forbidden.end()) {
        do_action({ActionKind::PutDown, held, ""});
        return;
      }
    }
    for (int p = 0; p < static_cast<int>(state.positions.size()); ++p) {
      if (std::find(forbidden.begin(), forbidden.end(), p) != forbidden.end()) {
        continue;
      }
      const auto& stack = state.positions[p];
      if (stack.empty()) continue;
      if (cs == ConstraintSet::BlockSize &&
          state.block_size(held) > state.block_size(stack.back())) {
        continue;
      }
      do_action({ActionKind::Stack, held, stack.back()});
      return;
    }
    failed = true;
  }

  // Removes every block above `name`, dumping outside `forbidden` positions.
  void clear_above(const std::string& name, std::vector<int> forbidden) {
    auto loc = state.locate(name);
    if (!loc) {
      failed = true;
      return;
    }
    forbidden.push_back(loc->first);
    while (!failed && !state.is_top(name)) {
      const auto& stack = state.positions[loc->first];
      acquire(stack.back());
      dump_held(forbidden);
    }
  }
};

}  // namespace

std::optional<Plan> staged_plan(const WorldState& initial, const GoalSpec& goal,
                                ConstraintSet cs) {
  if (static_cast<int>(goal.stacks.size()) >
      static_cast<int>(initial.positions.size())) {
    return std::nullopt;
  }
  StagedRun run{initial, cs};
  if (run.state.gripper.holding) run.dump_held({});

  GoalIndex index(goal);
  std::vector<int> homes;  // positions hosting completed goal prefixes

  for (const auto& goal_stack : goal.stacks) {
    int home = -1;
    for (size_t i = 0; i < goal_stack.size() && !run.failed; ++i) {
      const std::string& b = goal_stack[i];
      auto loc = run.state.locate(b);
      if (!loc) {
        run.failed = true;
        break;
      }
      if (i == 0) {
        if (loc->second == 0 &&
            std::find(homes.begin(), homes.end(), loc->first) == homes.end()) {
          home = loc->first;  // already a valid bottom; adopt in place
          homes.push_back(home);
          continue;
        }
        // Relocate b to the bottom of a fresh position.
        if (run.state.first_free_position()) {
          run.clear_above(b, {});
        }
        if (!run.failed && !run.state.first_free_position()) {
          // No free slot, or clearing the junk above b consumed the last
          // one: vacate a position. Prefer b's own; never touch a home.
          int at = run.state.locate(b)->first;
          int victim = at;
          if (std::find(homes.begin(), homes.end(), victim) != homes.end()) {
            victim = -1;
            for (int p = 0;
                 p < static_cast<int>(run.state.positions.size()); ++p) {
              if (p != at &&
                  std::find(homes.begin(), homes.end(), p) == homes.end()) {
                victim = p;
                break;
              }
            }
          }
          if (victim < 0) {
            run.failed = true;
            break;
          }
          std::vector<int> forbidden = {victim};
          while (!run.failed && !run.state.positions[victim].empty()) {
            run.acquire(run.state.positions[victim].back());
            run.dump_held(forbidden);
          }
          if (run.failed) break;
          run.clear_above(b, {victim});
        }
        if (run.failed) break;
        run.acquire(b);
        run.do_action({ActionKind::PutDown, b, ""});
        if (run.failed) break;
        home = run.state.locate(b)->first;
        homes.push_back(home);
        continue;
      }
      const std::string& support = goal_stack[i - 1];
      if (in_position(run.state, index, b)) continue;
      run.clear_above(support, {run.state.locate(b)->first});
      if (run.failed) break;
      run.clear_above(b, {run.state.locate(support)->first});
      if (run.failed) break;
      run.acquire(b);
      run.do_action({ActionKind::Stack, b, support});
    }
    if (run.failed) break;
  }

  if (run.failed || !is_goal(run.state, goal)) return std::nullopt;
  return run.plan;
}

}  // namespace blocksbench

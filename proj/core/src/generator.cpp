#include "blocksbench/generator.hpp"

#include <algorithm>
#include <set>

namespace blocksbench {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng::Rng(uint64_t seed) : state_(seed) {
  // Warm up so nearby seeds decorrelate immediately.
  splitmix64(state_);
}

uint64_t Rng::next() { return splitmix64(state_); }

uint32_t Rng::below(uint32_t bound) {
  if (bound <= 1) return 0;
  uint32_t mask = bound - 1;
  mask |= mask >> 1;
  mask |= mask >> 2;
  mask |= mask >> 4;
  mask |= mask >> 8;
  mask |= mask >> 16;
  uint32_t v;
  do {
    v = static_cast<uint32_t>(next() >> 32) & mask;
  } while (v >= bound);
  return v;
}

int Rng::range(int lo, int hi) {
  return lo + static_cast<int>(below(static_cast<uint32_t>(hi - lo + 1)));
}

bool Rng::chance(uint32_t num, uint32_t den) { return below(den) < num; }

std::string block_name(int index) {
  if (index < 26) return std::string(1, static_cast<char>('A' + index));
  return "A" + std::to_string(index - 25);
}

namespace {

constexpr int kMaxAttempts = 4000;

std::vector<std::string> make_names(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(block_name(i));
  return names;
}

std::vector<Block> make_blocks(const std::vector<std::string>& names,
                               const std::vector<int>& sizes) {
  std::vector<Block> blocks;
  for (size_t i = 0; i < names.size(); ++i) {
    blocks.push_back({names[i], sizes.empty() ? 1 : sizes[i]});
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const Block& a, const Block& b) { return a.name < b.name; });
  return blocks;
}

/// Random partition of the (shuffled) block list into `stacks` nonempty
/// bottom-to-top stacks.
std::vector<std::vector<std::string>> random_split(
    Rng& rng, std::vector<std::string> names, int stacks) {
  rng.shuffle(names);
  int n = static_cast<int>(names.size());
  std::vector<int> cuts;
  std::vector<int> options;
  for (int i = 1; i < n; ++i) options.push_back(i);
  rng.shuffle(options);
  for (int i = 0; i < stacks - 1; ++i) cuts.push_back(options[i]);
  cuts.push_back(0);
  cuts.push_back(n);
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::vector<std::string>> result;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    result.emplace_back(names.begin() + cuts[i], names.begin() + cuts[i + 1]);
  }
  return result;
}

std::vector<std::vector<std::string>> random_arrangement(
    Rng& rng, const std::vector<std::string>& names, int positions,
    int min_stacks = 1) {
  int max_stacks = std::min(positions, static_cast<int>(names.size()));
  int k = rng.range(std::min(min_stacks, max_stacks), max_stacks);
  return random_split(rng, names, k);
}

/// Scatters `stacks` over `positions` table slots in random order.
std::vector<std::vector<std::string>> place(
    Rng& rng, std::vector<std::vector<std::string>> stacks, int positions) {
  std::vector<int> slots;
  for (int i = 0; i < positions; ++i) slots.push_back(i);
  rng.shuffle(slots);
  std::vector<std::vector<std::string>> table(positions);
  for (size_t i = 0; i < stacks.size(); ++i) {
    table[slots[i]] = std::move(stacks[i]);
  }
  return table;
}

WorldState make_state(const std::vector<Block>& blocks,
                      std::vector<std::vector<std::string>> table,
                      std::optional<std::string> held = std::nullopt) {
  WorldState ws;
  ws.positions = std::move(table);
  ws.gripper.holding = std::move(held);
  for (const auto& block : blocks) ws.blocks[block.name] = block;
  return ws;
}

/// Teleports one in-position stack top somewhere it does not belong.
/// Returns false when no displacement is available.
bool displace_one(Rng& rng, WorldState& ws, const GoalIndex& index,
                  std::set<std::string>& displaced) {
  struct Pick {
    std::string block;
    int from;
  };
  std::vector<Pick> picks;
  for (int p = 0; p < static_cast<int>(ws.positions.size()); ++p) {
    const auto& stack = ws.positions[p];
    if (stack.empty()) continue;
    const std::string& top = stack.back();
    if (displaced.count(top)) continue;
    if (!in_position(ws, index, top)) continue;
    picks.push_back({top, p});
  }
  if (picks.empty()) return false;
  Pick pick = rng.pick(picks);

  auto wants_table = [&](const std::string& b) {
    auto below = index.below(b);
    return below && !below->has_value();
  };
  std::vector<int> dests;
  for (int q = 0; q < static_cast<int>(ws.positions.size()); ++q) {
    if (q == pick.from) continue;
    const auto& stack = ws.positions[q];
    if (stack.empty()) {
      if (!wants_table(pick.block)) dests.push_back(q);
      continue;
    }
    auto below = index.below(pick.block);
    bool constructive = below && below->has_value() &&
                        **below == stack.back() &&
                        in_position(ws, index, stack.back());
    if (!constructive) dests.push_back(q);
  }
  if (dests.empty()) return false;
  int q = dests[rng.below(static_cast<uint32_t>(dests.size()))];
  ws.positions[pick.from].pop_back();
  ws.positions[q].push_back(pick.block);
  displaced.insert(pick.block);
  return true;
}

struct Candidate {
  std::vector<Block> blocks;
  WorldState initial;
  std::vector<std::vector<std::string>> goal_stacks;
};

/// Runs the oracle and packages a Scenario when the instance closes within
/// default budgets; also enforces the suite envelope.
Result<Scenario, std::string> assemble(const GenSpec& spec, int category,
                                       ConstraintSet cs, Candidate c) {
  Scenario out;
  out.category = category;
  out.constraint_set = cs;
  out.positions = spec.positions;
  out.blocks = std::move(c.blocks);
  out.initial_stacks = c.initial.positions;
  out.initial_gripper = c.initial.gripper;
  std::sort(c.goal_stacks.begin(), c.goal_stacks.end());
  out.goal.stacks = std::move(c.goal_stacks);
  out.goal.description = describe_goal(out.goal);

  ScenarioMetadata meta;
  meta.block_count = static_cast<int>(out.blocks.size());
  meta.stack_positions = out.positions;
  GoalIndex index(out.goal);
  meta.misplaced_blocks = misplaced_count(c.initial, index);
  if (meta.misplaced_blocks > 10) return std::string("misplaced > 10");

  SolveResult solved = solve(c.initial, out.goal, cs);
  if (const auto* plan = std::get_if<Solved>(&solved)) {
    if (category == 3) return std::string("expected unsolvable");
    int len = static_cast<int>(plan->plan.steps.size());
    if (len < 4 || len > 80) return std::string("length outside 4..80");
    if (meta.misplaced_blocks < 2) return std::string("misplaced < 2");
    auto stats = plan_stats(c.initial, out.goal, cs, plan->plan);
    if (!stats.ok()) return std::string("oracle plan rejected");
    if (stats.value().non_constructive > 60) {
      return std::string("non-constructive > 60");
    }
    meta.min_solution_length = len;
    meta.non_constructive_in_optimal = stats.value().non_constructive;
  } else if (std::holds_alternative<Unsolvable>(solved)) {
    if (category != 3) return std::string("unexpectedly unsolvable");
  } else {
    return std::string("search budget exceeded");
  }
  out.metadata = meta;
  return out;
}

int optimal_length(const SolveResult& result) {
  if (const auto* solved = std::get_if<Solved>(&result)) {
    return static_cast<int>(solved->plan.steps.size());
  }
  return -1;
}

Result<Scenario, std::string> gen_displaced(const GenSpec& spec, int category,
                                            ConstraintSet cs, Rng& rng,
                                            bool want_equality,
                                            bool need_tall) {
  auto names = make_names(spec.blocks);
  auto blocks = make_blocks(names, {});
  for (int tries = 0; tries < 40; ++tries) {
    auto goal_stacks = random_arrangement(rng, names, spec.positions);
    GoalSpec goal{goal_stacks, ""};
    GoalIndex index(goal);
    WorldState ws = make_state(blocks, place(rng, goal_stacks, spec.positions));

    int target = rng.range(2, std::min({6, spec.blocks, 10}));
    std::set<std::string> displaced;
    for (int i = 0; i < target; ++i) {
      if (!displace_one(rng, ws, index, displaced)) break;
    }
    if (static_cast<int>(displaced.size()) < 2) continue;
    if (need_tall) {
      bool tall = false;
      for (const auto& stack : ws.positions) tall |= stack.size() >= 3;
      if (!tall) continue;
    }

    int m = misplaced_count(ws, index);
    SolveResult solved = solve(ws, goal, cs);
    int len = optimal_length(solved);
    if (len < 0) continue;
    bool matches = want_equality ? len == 2 * m : len > 2 * m;
    if (!matches) continue;
    return assemble(spec, category, cs, Candidate{blocks, ws, goal_stacks});
  }
  return std::string("no displaced instance");
}

Result<Scenario, std::string> gen_random_pair(const GenSpec& spec, int category,
                                              ConstraintSet cs, Rng& rng,
                                              bool want_detour,
                                              bool need_tall) {
  auto names = make_names(spec.blocks);
  auto blocks = make_blocks(names, {});
  auto initial_stacks = random_arrangement(rng, names, spec.positions);
  WorldState ws = make_state(blocks, place(rng, initial_stacks, spec.positions));
  if (need_tall) {
    bool tall = false;
    for (const auto& stack : ws.positions) tall |= stack.size() >= 3;
    if (!tall) return std::string("no tall stack");
  }
  auto goal_stacks = random_arrangement(rng, names, spec.positions);
  GoalSpec goal{goal_stacks, ""};
  GoalIndex index(goal);
  int m = misplaced_count(ws, index);
  if (m < 2) return std::string("misplaced < 2");

  SolveResult solved = solve(ws, goal, cs);
  int len = optimal_length(solved);
  if (len < 0) return std::string("did not solve");
  if (want_detour && len <= 2 * m) return std::string("no detour");
  return assemble(spec, category, cs, Candidate{blocks, ws, goal_stacks});
}

/// Category 2 for larger block counts: start from the goal, invert the top
/// pair of a tall stack (which provably forces parking moves), then add a few
/// ordinary displacements.
Result<Scenario, std::string> gen_inversion(const GenSpec& spec, Rng& rng) {
  auto names = make_names(spec.blocks);
  auto blocks = make_blocks(names, {});
  for (int tries = 0; tries < 40; ++tries) {
    auto goal_stacks = random_arrangement(rng, names, spec.positions);
    std::vector<size_t> tall;
    for (size_t i = 0; i < goal_stacks.size(); ++i) {
      if (goal_stacks[i].size() >= 3) tall.push_back(i);
    }
    if (tall.empty()) continue;
    GoalSpec goal{goal_stacks, ""};
    GoalIndex index(goal);
    WorldState ws = make_state(blocks, place(rng, goal_stacks, spec.positions));

    size_t g = tall[rng.below(static_cast<uint32_t>(tall.size()))];
    const auto& chain = goal_stacks[g];
    const std::string v = chain[chain.size() - 1];
    const std::string u = chain[chain.size() - 2];
    auto loc = ws.locate(v);
    auto& stack = ws.positions[loc->first];
    stack.pop_back();
    stack.pop_back();
    stack.push_back(v);
    stack.push_back(u);
    std::set<std::string> displaced = {u, v};

    int extra = rng.range(0, 2);
    for (int i = 0; i < extra; ++i) {
      if (!displace_one(rng, ws, index, displaced)) break;
    }

    int m = misplaced_count(ws, index);
    SolveResult solved = solve(ws, goal, ConstraintSet::Base);
    int len = optimal_length(solved);
    if (len < 0 || len <= 2 * m) continue;
    return assemble(spec, 2, ConstraintSet::Base,
                    Candidate{blocks, ws, goal_stacks});
  }
  return std::string("no inversion instance");
}

Result<Scenario, std::string> gen_cat1(const GenSpec& spec, Rng& rng) {
  return gen_displaced(spec, 1, ConstraintSet::Base, rng, true, false);
}

Result<Scenario, std::string> gen_cat2(const GenSpec& spec, Rng& rng) {
  if (spec.blocks > 8) return gen_inversion(spec, rng);
  return gen_random_pair(spec, 2, ConstraintSet::Base, rng, true, false);
}

std::vector<std::vector<std::string>> sort_stacks_by_size(
    std::vector<std::vector<std::string>> stacks,
    const std::vector<Block>& blocks) {
  auto size_of = [&](const std::string& name) {
    for (const auto& block : blocks) {
      if (block.name == name) return block.size;
    }
    return 1;
  };
  for (auto& stack : stacks) {
    std::stable_sort(stack.begin(), stack.end(),
                     [&](const std::string& a, const std::string& b) {
                       return size_of(a) > size_of(b);
                     });
  }
  return stacks;
}

/// Category 3, variant 1: the gripper starts holding a block too large for
/// every stack top, with no free position — zero legal successors.
Result<Scenario, std::string> gen_cat3_deadlock(const GenSpec& spec, Rng& rng) {
  if (spec.blocks - 1 < spec.positions) {
    return std::string("need at least P small blocks");
  }
  auto names = make_names(spec.blocks);
  std::vector<int> sizes(spec.blocks, 0);
  int large = rng.below(static_cast<uint32_t>(spec.blocks));
  for (int i = 0; i < spec.blocks; ++i) {
    sizes[i] = i == large ? 3 : rng.range(1, 2);
  }
  auto blocks = make_blocks(names, sizes);
  std::string held = names[large];

  std::vector<std::string> rest;
  for (const auto& name : names) {
    if (name != held) rest.push_back(name);
  }
  auto stacks = sort_stacks_by_size(random_split(rng, rest, spec.positions),
                                    blocks);
  WorldState ws =
      make_state(blocks, place(rng, stacks, spec.positions), held);

  auto goal_stacks = sort_stacks_by_size(
      random_arrangement(rng, names, spec.positions), blocks);
  return assemble(spec, 3, ConstraintSet::BlockSize,
                  Candidate{blocks, ws, goal_stacks});
}

/// Category 3, variant 2: a single size inversion buried inside an otherwise
/// plausible goal stack. Forces the closure proof to sweep a sizeable
/// reachable set (unlike the one-state deadlocks of variant 1).
Result<Scenario, std::string> gen_cat3_buried(const GenSpec& spec, Rng& rng) {
  auto names = make_names(spec.blocks);
  std::vector<int> sizes;
  for (int i = 0; i < spec.blocks; ++i) sizes.push_back(rng.range(1, 3));
  auto blocks = make_blocks(names, sizes);
  auto size_of = [&](const std::string& name) {
    for (const auto& block : blocks) {
      if (block.name == name) return block.size;
    }
    return 1;
  };

  auto initial = sort_stacks_by_size(
      random_arrangement(rng, names, spec.positions), blocks);
  WorldState ws = make_state(blocks, place(rng, initial, spec.positions));

  auto goal_stacks = sort_stacks_by_size(
      random_arrangement(rng, names, spec.positions), blocks);
  bool swapped = false;
  for (auto& stack : goal_stacks) {
    if (swapped || stack.size() < 2) continue;
    for (size_t h = stack.size(); h-- > 1;) {
      if (size_of(stack[h - 1]) > size_of(stack[h])) {
        std::swap(stack[h - 1], stack[h]);
        swapped = true;
        break;
      }
    }
  }
  if (!swapped) return std::string("no distinct-size pair to invert");

  SearchLimits closure;
  closure.require_closure = true;
  SolveResult proof =
      solve(ws, GoalSpec{goal_stacks, ""}, ConstraintSet::BlockSize, closure);
  const auto* impossible = std::get_if<Unsolvable>(&proof);
  if (!impossible || impossible->explored_states < 20) {
    return std::string("closure proof too small");
  }
  return assemble(spec, 3, ConstraintSet::BlockSize,
                  Candidate{blocks, ws, goal_stacks});
}

/// Category 3, variant 3: a goal stack ordered smallest-at-bottom, so the
/// size rule forbids ever building it.
Result<Scenario, std::string> gen_cat3_static(const GenSpec& spec, Rng& rng) {
  auto names = make_names(spec.blocks);
  std::vector<int> sizes;
  for (int i = 0; i < spec.blocks; ++i) sizes.push_back(rng.range(1, 3));
  auto blocks = make_blocks(names, sizes);
  auto size_of = [&](const std::string& name) {
    for (const auto& block : blocks) {
      if (block.name == name) return block.size;
    }
    return 1;
  };

  auto initial = sort_stacks_by_size(
      random_arrangement(rng, names, spec.positions), blocks);
  WorldState ws = make_state(blocks, place(rng, initial, spec.positions));

  auto goal_stacks = random_arrangement(rng, names, spec.positions, 1);
  bool inverted = false;
  for (auto& stack : goal_stacks) {
    std::stable_sort(stack.begin(), stack.end(),
                     [&](const std::string& a, const std::string& b) {
                       return size_of(a) < size_of(b);
                     });
    for (size_t h = 1; h < stack.size(); ++h) {
      inverted |= size_of(stack[h]) > size_of(stack[h - 1]);
    }
  }
  if (!inverted) return std::string("no size inversion in goal");
  return assemble(spec, 3, ConstraintSet::BlockSize,
                  Candidate{blocks, ws, goal_stacks});
}

/// Towers of Hanoi with `disks` disks. Position-agnostic goals would make
/// "move the tower" a no-op, so the tower is rebuilt on an anchor block that
/// is wider than every disk.
Result<Scenario, std::string> gen_hanoi(const GenSpec& spec, int disks) {
  auto names = make_names(disks + 1);
  std::vector<int> sizes;
  for (int i = 0; i < disks; ++i) sizes.push_back(i + 1);
  sizes.push_back(disks + 1);  // anchor
  auto blocks = make_blocks(names, sizes);
  const std::string anchor = names[disks];

  std::vector<std::string> tower;  // bottom = widest disk
  for (int i = disks - 1; i >= 0; --i) tower.push_back(names[i]);
  std::vector<std::vector<std::string>> table(3);
  table[0] = tower;
  table[1] = {anchor};
  WorldState ws = make_state(blocks, table);

  std::vector<std::string> goal_stack = {anchor};
  for (const auto& disk : tower) goal_stack.push_back(disk);

  GenSpec fixed = spec;
  fixed.blocks = disks + 1;
  fixed.positions = 3;
  return assemble(fixed, 4, ConstraintSet::BlockSize,
                  Candidate{blocks, ws, {goal_stack}});
}

Result<Scenario, std::string> gen_cat4_random(const GenSpec& spec, Rng& rng) {
  auto names = make_names(spec.blocks);
  std::vector<int> sizes;
  for (int i = 0; i < spec.blocks; ++i) sizes.push_back(rng.range(1, 3));
  auto blocks = make_blocks(names, sizes);

  auto initial = sort_stacks_by_size(
      random_arrangement(rng, names, spec.positions), blocks);
  WorldState ws = make_state(blocks, place(rng, initial, spec.positions));
  auto goal_stacks = sort_stacks_by_size(
      random_arrangement(rng, names, spec.positions), blocks);
  GoalSpec goal{goal_stacks, ""};

  SolveResult constrained = solve(ws, goal, ConstraintSet::BlockSize);
  int len_bs = optimal_length(constrained);
  if (len_bs < 0) return std::string("unsolvable under block_size");
  SolveResult unconstrained = solve(ws, goal, ConstraintSet::Base);
  int len_base = optimal_length(unconstrained);
  if (len_base < 0) return std::string("base solve failed");
  if (len_bs <= len_base) return std::string("no size-forced detour");
  return assemble(spec, 4, ConstraintSet::BlockSize,
                  Candidate{blocks, ws, goal_stacks});
}

Result<Scenario, std::string> gen_cat5(const GenSpec& spec, Rng& rng) {
  bool pair_style = spec.variant == 2 && spec.blocks <= 8;
  if (pair_style) {
    return gen_random_pair(spec, 5, ConstraintSet::PartialObservability, rng,
                           false, true);
  }
  return gen_displaced(spec, 5, ConstraintSet::PartialObservability, rng,
                       spec.variant != 2, true);
}

Result<Scenario, std::string> dispatch(const GenSpec& spec, Rng& rng) {
  switch (spec.category) {
    case 1: return gen_cat1(spec, rng);
    case 2: return gen_cat2(spec, rng);
    case 3:
      switch (spec.variant == 0 ? 1 + static_cast<int>(rng.below(3))
                                : spec.variant) {
        case 1: return gen_cat3_deadlock(spec, rng);
        case 2: return gen_cat3_buried(spec, rng);
        default: return gen_cat3_static(spec, rng);
      }
    case 4:
      if (spec.variant >= 3) return gen_hanoi(spec, spec.variant);
      return gen_cat4_random(spec, rng);
    case 5: return gen_cat5(spec, rng);
    default: return std::string("unknown category");
  }
}

}  // namespace

Result<Scenario, std::string> generate_scenario(const GenSpec& spec) {
  if (spec.blocks < 3 || spec.blocks > 20 || spec.positions < 3 ||
      spec.positions > 6) {
    return std::string("parameters outside the suite envelope "
                       "(3..20 blocks, 3..6 positions)");
  }
  std::string last = "exhausted";
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    uint64_t state = spec.seed ^ (0xA24BAED4963EE407ULL *
                                  static_cast<uint64_t>(attempt + 1));
    Rng rng(splitmix64(state));
    auto result = dispatch(spec, rng);
    if (result.ok()) return result;
    last = result.error();
  }
  return std::string("GenerationExhausted after " +
                     std::to_string(kMaxAttempts) + " attempts (last: " + last +
                     ")");
}

namespace {

struct Recipe {
  int category;
  int blocks;
  int positions;
  int variant;
};

const Recipe kSuite[] = {
    {1, 3, 3, 0},  {1, 4, 3, 0},  {1, 5, 4, 0},  {1, 6, 4, 0},  {1, 7, 5, 0},
    {1, 8, 5, 0},  {1, 10, 4, 0}, {1, 12, 5, 0}, {1, 16, 6, 0}, {1, 20, 6, 0},
    {2, 3, 3, 0},  {2, 4, 3, 0},  {2, 5, 3, 0},  {2, 5, 4, 0},  {2, 6, 4, 0},
    {2, 7, 4, 0},  {2, 8, 3, 0},  {2, 8, 4, 0},  {2, 10, 5, 0}, {2, 12, 6, 0},
    {3, 4, 3, 1},  {3, 5, 3, 1},  {3, 6, 4, 1},  {3, 7, 4, 1},  {3, 4, 3, 2},
    {3, 5, 3, 2},  {3, 6, 3, 2},  {3, 3, 3, 3},  {3, 4, 3, 3},  {3, 5, 4, 3},
    {4, 4, 3, 3},  {4, 5, 3, 4},  {4, 6, 3, 5},  {4, 4, 3, 0},  {4, 5, 3, 0},
    {4, 5, 4, 0},  {4, 6, 3, 0},  {4, 6, 4, 0},  {4, 7, 4, 0},  {4, 8, 4, 0},
    {5, 4, 3, 1},  {5, 5, 3, 2},  {5, 6, 4, 1},  {5, 7, 4, 2},  {5, 8, 4, 1},
    {5, 8, 3, 2},  {5, 10, 4, 1}, {5, 12, 5, 1}, {5, 16, 6, 1}, {5, 20, 6, 1},
};

}  // namespace

Result<std::vector<Scenario>, std::string> generate_suite(uint64_t master_seed) {
  std::vector<Scenario> suite;
  int index_in_category = 0;
  int previous_category = 0;
  for (const Recipe& recipe : kSuite) {
    index_in_category =
        recipe.category == previous_category ? index_in_category + 1 : 1;
    previous_category = recipe.category;

    uint64_t state = master_seed ^
                     ((static_cast<uint64_t>(recipe.category) << 32) |
                      static_cast<uint64_t>(index_in_category));
    GenSpec spec;
    spec.category = recipe.category;
    spec.blocks = recipe.blocks;
    spec.positions = recipe.positions;
    spec.variant = recipe.variant;
    spec.seed = splitmix64(state);

    auto generated = generate_scenario(spec);
    if (!generated.ok()) {
      return std::string("cat" + std::to_string(recipe.category) + "/s" +
                         (index_in_category < 10 ? "0" : "") +
                         std::to_string(index_in_category) + ": " +
                         generated.error());
    }
    Scenario scenario = std::move(generated.value());
    scenario.id = "cat" + std::to_string(recipe.category) + "/s" +
                  (index_in_category < 10 ? "0" : "") +
                  std::to_string(index_in_category);
    suite.push_back(std::move(scenario));
  }
  return suite;
}

}  // namespace blocksbench

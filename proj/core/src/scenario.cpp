#include "blocksbench/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace blocksbench {

using nlohmann::json;

WorldState Scenario::initial_state() const {
  WorldState state;
  state.positions = initial_stacks;
  state.gripper = initial_gripper;
  for (const auto& block : blocks) state.blocks[block.name] = block;
  return state;
}

namespace {

struct Loader {
  const json& doc;
  bool strict;
  std::optional<SchemaError> error;

  void fail(const std::string& pointer, const std::string& message) {
    if (!error) error = SchemaError{pointer, message};
  }

  const json* want(const json& parent, const std::string& pointer,
                   const char* key, json::value_t type, bool required = true) {
    if (!parent.contains(key)) {
      if (required) fail(pointer + "/" + key, "missing required field");
      return nullptr;
    }
    const json& value = parent[key];
    bool ok = value.type() == type ||
              (type == json::value_t::number_integer && value.is_number_integer());
    if (!ok) {
      fail(pointer + "/" + key, "wrong type");
      return nullptr;
    }
    return &value;
  }

  Scenario run() {
    Scenario out;
    if (!doc.is_object()) {
      fail("", "scenario document must be a JSON object");
      return out;
    }

    if (const json* id = want(doc, "", "id", json::value_t::string, strict)) {
      out.id = id->get<std::string>();
      if (out.id.empty()) fail("/id", "id must be nonempty");
    } else if (!strict) {
      out.id = "custom";
    }

    if (const json* cat =
            want(doc, "", "category", json::value_t::number_integer, strict)) {
      out.category = cat->get<int>();
      if (out.category < 1 || out.category > 5) {
        fail("/category", "category must be within 1..5");
      }
    }

    if (const json* cs = want(doc, "", "constraint_set", json::value_t::string)) {
      auto parsed = parse_constraint_set(cs->get<std::string>());
      if (!parsed) {
        fail("/constraint_set",
             "expected base, block_size or partial_observability");
      } else {
        out.constraint_set = *parsed;
      }
    }

    if (const json* p =
            want(doc, "", "positions", json::value_t::number_integer)) {
      out.positions = p->get<int>();
      if (out.positions < 1) fail("/positions", "positions must be >= 1");
    }

    std::set<std::string> names;
    if (const json* blocks = want(doc, "", "blocks", json::value_t::array)) {
      if (blocks->empty()) fail("/blocks", "at least one block is required");
      for (size_t i = 0; i < blocks->size() && !error; ++i) {
        std::string ptr = "/blocks/" + std::to_string(i);
        const json& entry = (*blocks)[i];
        if (!entry.is_object()) {
          fail(ptr, "block entry must be an object");
          break;
        }
        Block block;
        if (const json* name = want(entry, ptr, "name", json::value_t::string)) {
          block.name = name->get<std::string>();
          if (block.name.empty()) fail(ptr + "/name", "name must be nonempty");
          if (block.name == "unknown") {
            fail(ptr + "/name", "'unknown' is a reserved name");
          }
          if (!names.insert(block.name).second) {
            fail(ptr + "/name", "duplicate block name " + block.name);
          }
        }
        if (const json* size =
                want(entry, ptr, "size", json::value_t::number_integer)) {
          block.size = size->get<int>();
          if (block.size < 1) fail(ptr + "/size", "size must be >= 1");
        }
        out.blocks.push_back(std::move(block));
      }
    }

    auto read_stack = [&](const json& stack, const std::string& ptr)
        -> std::vector<std::string> {
      std::vector<std::string> result;
      if (!stack.is_array()) {
        fail(ptr, "stack must be an array of block names");
        return result;
      }
      for (size_t i = 0; i < stack.size(); ++i) {
        if (!stack[i].is_string()) {
          fail(ptr + "/" + std::to_string(i), "block name must be a string");
          return result;
        }
        std::string name = stack[i].get<std::string>();
        if (!names.count(name)) {
          fail(ptr + "/" + std::to_string(i), "unknown block " + name);
          return result;
        }
        result.push_back(std::move(name));
      }
      return result;
    };

    if (const json* initial = want(doc, "", "initial", json::value_t::object)) {
      std::set<std::string> placed;
      if (const json* stacks =
              want(*initial, "/initial", "stacks", json::value_t::array)) {
        if (static_cast<int>(stacks->size()) != out.positions) {
          fail("/initial/stacks",
               "expected exactly " + std::to_string(out.positions) +
                   " stacks (one per position)");
        }
        for (size_t i = 0; i < stacks->size() && !error; ++i) {
          std::string ptr = "/initial/stacks/" + std::to_string(i);
          auto stack = read_stack((*stacks)[i], ptr);
          for (const auto& name : stack) {
            if (!placed.insert(name).second) {
              fail(ptr, "block " + name + " appears more than once");
            }
          }
          out.initial_stacks.push_back(std::move(stack));
        }
      }
      if (const json* gripper =
              want(*initial, "/initial", "gripper", json::value_t::object)) {
        const json* state =
            want(*gripper, "/initial/gripper", "state", json::value_t::string);
        if (state) {
          std::string value = state->get<std::string>();
          if (value == "holding") {
            const json* block = want(*gripper, "/initial/gripper", "block",
                                     json::value_t::string);
            if (block) {
              std::string name = block->get<std::string>();
              if (!names.count(name)) {
                fail("/initial/gripper/block", "unknown block " + name);
              } else if (!placed.insert(name).second) {
                fail("/initial/gripper/block",
                     "held block " + name + " also appears in a stack");
              } else {
                out.initial_gripper.holding = name;
              }
            }
          } else if (value == "idle") {
            if (gripper->contains("block")) {
              fail("/initial/gripper/block",
                   "'block' is not allowed when state is idle");
            }
          } else {
            fail("/initial/gripper/state", "expected 'idle' or 'holding'");
          }
        }
      }
      if (!error && placed.size() != names.size()) {
        fail("/initial", "every block must appear exactly once");
      }
    }

    if (!error && out.constraint_set == ConstraintSet::BlockSize) {
      auto size_of = [&](const std::string& name) {
        for (const auto& block : out.blocks) {
          if (block.name == name) return block.size;
        }
        return 1;
      };
      for (size_t i = 0; i < out.initial_stacks.size(); ++i) {
        const auto& stack = out.initial_stacks[i];
        for (size_t h = 1; h < stack.size(); ++h) {
          if (size_of(stack[h]) > size_of(stack[h - 1])) {
            fail("/initial/stacks/" + std::to_string(i),
                 "initial stack violates the size ordering (" + stack[h] +
                     " on " + stack[h - 1] + ")");
          }
        }
      }
    }

    if (const json* goal = want(doc, "", "goal", json::value_t::object)) {
      if (const json* stacks =
              want(*goal, "/goal", "stacks", json::value_t::array)) {
        std::set<std::string> covered;
        if (static_cast<int>(stacks->size()) > out.positions) {
          fail("/goal/stacks", "more goal stacks than table positions");
        }
        for (size_t i = 0; i < stacks->size() && !error; ++i) {
          std::string ptr = "/goal/stacks/" + std::to_string(i);
          auto stack = read_stack((*stacks)[i], ptr);
          if (!error && stack.empty()) fail(ptr, "goal stacks must be nonempty");
          for (const auto& name : stack) {
            if (!covered.insert(name).second) {
              fail(ptr, "block " + name + " appears more than once in the goal");
            }
          }
          out.goal.stacks.push_back(std::move(stack));
        }
        if (!error && covered.size() != names.size()) {
          fail("/goal", "goal must cover every block exactly once");
        }
      }
      if (const json* description = want(*goal, "/goal", "description",
                                         json::value_t::string, strict)) {
        out.goal.description = description->get<std::string>();
      } else if (!strict && !error) {
        out.goal.description = describe_goal(out.goal);
      }
    }

    bool pair_ok = true;
    switch (out.category) {
      case 1:
      case 2: pair_ok = out.constraint_set == ConstraintSet::Base; break;
      case 4: pair_ok = out.constraint_set == ConstraintSet::BlockSize; break;
      case 5:
        pair_ok = out.constraint_set == ConstraintSet::PartialObservability;
        break;
      default: break;  // category 3 and custom allow any set
    }
    if (!error && !pair_ok) {
      fail("/constraint_set",
           "constraint set not allowed for category " +
               std::to_string(out.category));
    }

    if (strict) {
      if (const json* meta = want(doc, "", "metadata", json::value_t::object)) {
        auto read_opt_int = [&](const char* key) -> std::optional<int> {
          std::string ptr = std::string("/metadata/") + key;
          if (!meta->contains(key)) {
            fail(ptr, "missing required field");
            return std::nullopt;
          }
          const json& value = (*meta)[key];
          if (value.is_null()) return std::nullopt;
          if (!value.is_number_integer() || value.get<int>() < 0) {
            fail(ptr, "expected a nonnegative integer or null");
            return std::nullopt;
          }
          return value.get<int>();
        };
        out.metadata.min_solution_length = read_opt_int("min_solution_length");
        out.metadata.non_constructive_in_optimal =
            read_opt_int("non_constructive_in_optimal");
        if (const json* flag = want(*meta, "/metadata", "length_is_upper_bound",
                                    json::value_t::boolean)) {
          out.metadata.length_is_upper_bound = flag->get<bool>();
        }
        if (const json* count = want(*meta, "/metadata", "block_count",
                                     json::value_t::number_integer)) {
          out.metadata.block_count = count->get<int>();
          if (out.metadata.block_count != static_cast<int>(out.blocks.size())) {
            fail("/metadata/block_count", "does not match the block list");
          }
        }
        if (const json* count = want(*meta, "/metadata", "stack_positions",
                                     json::value_t::number_integer)) {
          out.metadata.stack_positions = count->get<int>();
          if (out.metadata.stack_positions != out.positions) {
            fail("/metadata/stack_positions", "does not match 'positions'");
          }
        }
        if (const json* count = want(*meta, "/metadata", "misplaced_blocks",
                                     json::value_t::number_integer)) {
          out.metadata.misplaced_blocks = count->get<int>();
        }
        if (!error) {
          bool impossible = !out.metadata.min_solution_length.has_value();
          if (impossible != !out.metadata.non_constructive_in_optimal.has_value()) {
            fail("/metadata",
                 "min_solution_length and non_constructive_in_optimal must be "
                 "null together");
          }
          if (out.category == 3 && !impossible) {
            fail("/metadata/min_solution_length",
                 "category 3 scenarios must be impossible");
          }
          if (out.category >= 1 && out.category != 3 && impossible) {
            fail("/metadata/min_solution_length",
                 "solvable categories require a solution length");
          }
        }
      }
    } else {
      out.metadata.block_count = static_cast<int>(out.blocks.size());
      out.metadata.stack_positions = out.positions;
    }

    if (!error) {
      WorldState state = out.initial_state();
      GoalIndex index(out.goal);
      int misplaced = misplaced_count(state, index);
      if (strict && misplaced != out.metadata.misplaced_blocks) {
        fail("/metadata/misplaced_blocks",
             "expected " + std::to_string(misplaced));
      }
      if (!strict) out.metadata.misplaced_blocks = misplaced;
    }
    return out;
  }
};

Result<Scenario, SchemaError> load(const json& doc, bool strict) {
  Loader loader{doc, strict};
  Scenario scenario = loader.run();
  if (loader.error) return *loader.error;
  return scenario;
}

}  // namespace

Result<Scenario, SchemaError> load_scenario(const json& doc) {
  return load(doc, true);
}

Result<Scenario, SchemaError> load_custom_scenario(const json& doc) {
  return load(doc, false);
}

Result<Scenario, SchemaError> load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return SchemaError{"", "cannot open " + path};
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) return SchemaError{"", "invalid JSON in " + path};
  return load_scenario(doc);
}

json scenario_to_json(const Scenario& scenario) {
  json blocks = json::array();
  for (const auto& block : scenario.blocks) {
    blocks.push_back(json{{"name", block.name}, {"size", block.size}});
  }
  json gripper;
  if (scenario.initial_gripper.holding) {
    gripper = json{{"state", "holding"},
                   {"block", *scenario.initial_gripper.holding}};
  } else {
    gripper = json{{"state", "idle"}};
  }
  json metadata{
      {"min_solution_length", scenario.metadata.min_solution_length
                                  ? json(*scenario.metadata.min_solution_length)
                                  : json(nullptr)},
      {"length_is_upper_bound", scenario.metadata.length_is_upper_bound},
      {"block_count", scenario.metadata.block_count},
      {"stack_positions", scenario.metadata.stack_positions},
      {"misplaced_blocks", scenario.metadata.misplaced_blocks},
      {"non_constructive_in_optimal",
       scenario.metadata.non_constructive_in_optimal
           ? json(*scenario.metadata.non_constructive_in_optimal)
           : json(nullptr)}};
  return json{{"id", scenario.id},
              {"category", scenario.category},
              {"constraint_set", to_string(scenario.constraint_set)},
              {"positions", scenario.positions},
              {"blocks", std::move(blocks)},
              {"initial",
               json{{"stacks", scenario.initial_stacks},
                    {"gripper", std::move(gripper)}}},
              {"goal",
               json{{"stacks", scenario.goal.stacks},
                    {"description", scenario.goal.description}}},
              {"metadata", std::move(metadata)}};
}

std::string scenario_to_file_bytes(const Scenario& scenario) {
  return scenario_to_json(scenario).dump(2) + "\n";
}

Result<ScenarioMetadata, std::string> recompute_metadata(
    const Scenario& scenario, const SearchLimits& limits) {
  ScenarioMetadata meta;
  meta.block_count = static_cast<int>(scenario.blocks.size());
  meta.stack_positions = scenario.positions;

  WorldState initial = scenario.initial_state();
  GoalIndex index(scenario.goal);
  meta.misplaced_blocks = misplaced_count(initial, index);

  SolveResult result =
      solve(initial, scenario.goal, scenario.constraint_set, limits);
  if (const auto* solved = std::get_if<Solved>(&result)) {
    meta.min_solution_length = static_cast<int>(solved->plan.steps.size());
    meta.length_is_upper_bound = !solved->optimal;
    auto stats =
        plan_stats(initial, scenario.goal, scenario.constraint_set, solved->plan);
    if (!stats.ok()) return std::string("oracle plan failed verification");
    meta.non_constructive_in_optimal = stats.value().non_constructive;
    return meta;
  }
  if (std::holds_alternative<Unsolvable>(result)) {
    return meta;  // min_solution_length stays null
  }
  auto fallback = staged_plan(initial, scenario.goal, scenario.constraint_set);
  if (!fallback) {
    return std::string("search budget exceeded and the staged builder found "
                       "no plan for " +
                       scenario.id);
  }
  auto stats =
      plan_stats(initial, scenario.goal, scenario.constraint_set, *fallback);
  if (!stats.ok()) return std::string("staged plan failed verification");
  meta.min_solution_length = stats.value().length;
  meta.length_is_upper_bound = true;
  meta.non_constructive_in_optimal = stats.value().non_constructive;
  return meta;
}

std::string describe_goal(const GoalSpec& goal) {
  std::vector<std::string> stack_clauses;
  std::vector<std::string> singles;
  for (const auto& stack : goal.stacks) {
    if (stack.size() == 1) {
      singles.push_back(stack[0]);
      continue;
    }
    std::string clause = "stack ";
    for (size_t i = 1; i < stack.size(); ++i) {
      if (i > 1) clause += " and ";
      clause += stack[i] + " on " + stack[i - 1];
    }
    stack_clauses.push_back(std::move(clause));
  }
  auto list_names = [](const std::vector<std::string>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
      if (i > 0) out += i + 1 == items.size() ? " and " : ", ";
      out += items[i];
    }
    return out;
  };
  std::vector<std::string> clauses = std::move(stack_clauses);
  if (!singles.empty()) {
    clauses.push_back("place " + list_names(singles) +
                      (singles.size() > 1 ? " each alone on the table"
                                          : " alone on the table"));
  }
  std::string sentence;
  for (size_t i = 0; i < clauses.size(); ++i) {
    if (i > 0) sentence += "; ";
    sentence += clauses[i];
  }
  if (sentence.empty()) sentence = "leave the table empty";
  sentence[0] = static_cast<char>(std::toupper(sentence[0]));
  return sentence + ".";
}

Result<ScenarioStore, std::string> ScenarioStore::load_dir(
    const std::string& dir) {
  namespace fs = std::filesystem;
  ScenarioStore store;
  if (!fs::is_directory(dir)) {
    return std::string("not a directory: " + dir);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    auto loaded = load_scenario_file(path.string());
    if (!loaded.ok()) {
      return std::string(path.string() + ": " + loaded.error().pointer + ": " +
                         loaded.error().message);
    }
    std::string expected_id =
        path.parent_path().filename().string() + "/" + path.stem().string();
    if (loaded.value().id != expected_id) {
      return std::string(path.string() + ": id '" + loaded.value().id +
                         "' does not match its path");
    }
    store.scenarios_.push_back(std::move(loaded.value()));
  }
  std::sort(store.scenarios_.begin(), store.scenarios_.end(),
            [](const Scenario& a, const Scenario& b) { return a.id < b.id; });
  return store;
}

namespace {

std::string opt_str(const std::optional<int>& value) {
  return value ? std::to_string(*value) : "null";
}

}  // namespace

std::vector<std::string> validate_suite(const ScenarioStore& store,
                                        const SearchLimits& limits) {
  std::vector<std::string> problems;
  std::map<int, int> per_category;
  for (const Scenario& s : store.all()) per_category[s.category]++;
  if (store.all().size() != 50) {
    problems.push_back("expected 50 scenarios, found " +
                       std::to_string(store.all().size()));
  }
  for (int cat = 1; cat <= 5; ++cat) {
    if (per_category[cat] != 10) {
      problems.push_back("category " + std::to_string(cat) + " has " +
                         std::to_string(per_category[cat]) +
                         " scenarios, expected 10");
    }
    for (int i = 1; i <= 10; ++i) {
      std::string id = "cat" + std::to_string(cat) + "/s" +
                       (i < 10 ? "0" : "") + std::to_string(i);
      if (!store.find(id)) problems.push_back("missing scenario " + id);
    }
  }

  for (const Scenario& s : store.all()) {
    auto say = [&](const std::string& msg) {
      problems.push_back(s.id + ": " + msg);
    };
    int blocks = static_cast<int>(s.blocks.size());
    if (blocks < 3 || blocks > 20) say("block count outside 3..20");
    if (s.positions < 3 || s.positions > 6) say("positions outside 3..6");
    if (s.metadata.misplaced_blocks > 10) say("more than 10 misplaced blocks");
    if (s.metadata.min_solution_length) {
      int len = *s.metadata.min_solution_length;
      if (len < 4 || len > 80) say("solution length outside 4..80");
      if (!s.metadata.non_constructive_in_optimal) {
        say("solvable but non_constructive_in_optimal is null");
      } else if (*s.metadata.non_constructive_in_optimal > 60) {
        say("more than 60 non-constructive steps");
      }
    }

    auto recomputed = recompute_metadata(s, limits);
    if (!recomputed.ok()) {
      say("metadata recompute failed: " + recomputed.error());
      continue;
    }
    const ScenarioMetadata& m = recomputed.value();
    if (m.min_solution_length != s.metadata.min_solution_length) {
      say("min_solution_length " + opt_str(s.metadata.min_solution_length) +
          " != recomputed " + opt_str(m.min_solution_length));
    }
    if (m.length_is_upper_bound != s.metadata.length_is_upper_bound) {
      say("length_is_upper_bound mismatch");
    }
    if (m.block_count != s.metadata.block_count) say("block_count mismatch");
    if (m.stack_positions != s.metadata.stack_positions) {
      say("stack_positions mismatch");
    }
    if (m.misplaced_blocks != s.metadata.misplaced_blocks) {
      say("misplaced_blocks mismatch");
    }
    if (m.non_constructive_in_optimal !=
        s.metadata.non_constructive_in_optimal) {
      say("non_constructive_in_optimal mismatch");
    }

    int misplaced = s.metadata.misplaced_blocks;
    switch (s.category) {
      case 1:
        if (!s.metadata.min_solution_length ||
            *s.metadata.min_solution_length != 2 * misplaced ||
            misplaced < 2) {
          say("not a two-moves-per-block instance");
        }
        break;
      case 2:
        if (!s.metadata.min_solution_length ||
            *s.metadata.min_solution_length <= 2 * misplaced ||
            misplaced < 2) {
          say("optimal length does not exceed 2x misplaced");
        }
        break;
      case 3: {
        if (s.metadata.min_solution_length) {
          say("category 3 scenario has a solution length");
          break;
        }
        SearchLimits closure = limits;
        closure.require_closure = true;
        auto proof = solve(s.initial_state(), s.goal, s.constraint_set, closure);
        if (!std::holds_alternative<Unsolvable>(proof)) {
          say("reachable-set closure did not prove impossibility in budget");
        }
        break;
      }
      case 4: {
        if (!s.metadata.min_solution_length) {
          say("category 4 scenario is unsolvable");
          break;
        }
        auto base = solve(s.initial_state(), s.goal, ConstraintSet::Base,
                          limits);
        const auto* solved = std::get_if<Solved>(&base);
        if (!solved || static_cast<int>(solved->plan.steps.size()) >=
                           *s.metadata.min_solution_length) {
          say("size rule does not lengthen the optimal plan");
        }
        break;
      }
      case 5: {
        if (!s.metadata.min_solution_length) {
          say("category 5 scenario is unsolvable");
          break;
        }
        bool tall = false;
        for (const auto& stack : s.initial_stacks) tall |= stack.size() >= 3;
        if (!tall) say("no initial stack of height >= 3");
        break;
      }
      default:
        say("unexpected category");
    }
  }
  return problems;
}

void ScenarioStore::add(Scenario scenario) {
  auto it = std::find_if(
      scenarios_.begin(), scenarios_.end(),
      [&](const Scenario& existing) { return existing.id == scenario.id; });
  if (it != scenarios_.end()) {
    *it = std::move(scenario);
    return;
  }
  scenarios_.push_back(std::move(scenario));
  std::sort(scenarios_.begin(), scenarios_.end(),
            [](const Scenario& a, const Scenario& b) { return a.id < b.id; });
}

const Scenario* ScenarioStore::find(const std::string& id) const {
  for (const auto& scenario : scenarios_) {
    if (scenario.id == id) return &scenario;
  }
  return nullptr;
}

}  // namespace blocksbench

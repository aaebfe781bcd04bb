// Command line front end: serve the REST API, bridge it to MCP, run the
// search oracle and verifier offline, generate and validate scenario suites,
// and drive the evaluation harness.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "blocksbench/generator.hpp"
#include "blocksbench/harness.hpp"
#include "blocksbench/mcp_gateway.hpp"
#include "blocksbench/planner.hpp"
#include "blocksbench/scenario.hpp"
#include "blocksbench/service.hpp"
#include "blocksbench/verifier.hpp"

namespace {

using blocksbench::Result;
using blocksbench::Scenario;
using blocksbench::ScenarioStore;
using nlohmann::json;

constexpr int kExitFailure = 1;  // domain failure (unsolvable, invalid, ...)
constexpr int kExitUsage = 2;    // bad invocation or unreadable input

struct ScenarioInput {
  std::string file;
  std::string id;
  std::string dir = "scenarios";
};

void add_scenario_options(CLI::App* cmd, ScenarioInput& input) {
  auto* file = cmd->add_option("--file", input.file, "Scenario JSON file");
  auto* id = cmd->add_option("--id", input.id,
                             "Scenario id inside the suite directory");
  cmd->add_option("--dir", input.dir, "Suite directory (with --id)")
      ->capture_default_str();
  file->excludes(id);
}

int load_input(const ScenarioInput& input, Scenario& out) {
  if (!input.file.empty()) {
    auto loaded = blocksbench::load_scenario_file(input.file);
    if (!loaded.ok()) {
      std::cerr << "error: " << input.file << ": " << loaded.error().pointer
                << ": " << loaded.error().message << "\n";
      return kExitUsage;
    }
    out = std::move(loaded.value());
    return 0;
  }
  if (input.id.empty()) {
    std::cerr << "error: pass --file or --id\n";
    return kExitUsage;
  }
  auto store = ScenarioStore::load_dir(input.dir);
  if (!store.ok()) {
    std::cerr << "error: " << store.error() << "\n";
    return kExitUsage;
  }
  const Scenario* found = store.value().find(input.id);
  if (!found) {
    std::cerr << "error: no scenario '" << input.id << "' in " << input.dir
              << "\n";
    return kExitUsage;
  }
  out = *found;
  return 0;
}

json plan_json(const blocksbench::Plan& plan) {
  return blocksbench::plan_to_json(plan);
}

int cmd_solve(const ScenarioInput& input, bool as_json, bool require_closure) {
  Scenario scenario;
  if (int rc = load_input(input, scenario)) return rc;
  blocksbench::SearchLimits limits;
  limits.require_closure = require_closure;
  auto result = blocksbench::solve(scenario.initial_state(), scenario.goal,
                                   scenario.constraint_set, limits);

  if (const auto* solved = std::get_if<blocksbench::Solved>(&result)) {
    if (as_json) {
      json out = plan_json(solved->plan);
      out["optimal"] = solved->optimal;
      out["length"] = solved->plan.steps.size();
      std::cout << out.dump(2) << "\n";
    } else {
      std::cout << "solved in " << solved->plan.steps.size() << " steps"
                << (solved->optimal ? " (optimal)" : "") << "\n";
      int n = 1;
      for (const auto& step : solved->plan.steps) {
        std::cout << "  " << n++ << ". " << to_string(step.kind) << " "
                  << step.block;
        if (step.kind == blocksbench::ActionKind::Stack ||
            step.kind == blocksbench::ActionKind::Unstack) {
          std::cout << " " << step.target;
        }
        std::cout << "\n";
      }
    }
    return 0;
  }
  if (const auto* closed = std::get_if<blocksbench::Unsolvable>(&result)) {
    if (as_json) {
      std::cout << json{{"unsolvable", true},
                        {"explored_states", closed->explored_states}}
                       .dump(2)
                << "\n";
    } else {
      std::cout << "unsolvable (closure over " << closed->explored_states
                << " states)\n";
    }
    return kExitFailure;
  }
  const auto& limit = std::get<blocksbench::ResourceLimit>(result);
  std::cerr << "search budget exhausted after " << limit.explored_states
            << " states\n";
  return kExitFailure;
}

int cmd_prove_impossible(const ScenarioInput& input, bool as_json) {
  Scenario scenario;
  if (int rc = load_input(input, scenario)) return rc;
  blocksbench::SearchLimits limits;
  limits.require_closure = true;
  auto result = blocksbench::solve(scenario.initial_state(), scenario.goal,
                                   scenario.constraint_set, limits);
  if (const auto* closed = std::get_if<blocksbench::Unsolvable>(&result)) {
    if (as_json) {
      std::cout << json{{"impossible", true},
                        {"explored_states", closed->explored_states}}
                       .dump(2)
                << "\n";
    } else {
      std::cout << "impossible: every reachable state explored ("
                << closed->explored_states << "), goal never seen\n";
    }
    return 0;
  }
  if (std::holds_alternative<blocksbench::Solved>(result)) {
    std::cerr << "scenario is solvable\n";
  } else {
    std::cerr << "could not close the reachable set within budget\n";
  }
  return kExitFailure;
}

int cmd_stats(const ScenarioInput& input, bool as_json) {
  Scenario scenario;
  if (int rc = load_input(input, scenario)) return rc;
  auto recomputed = blocksbench::recompute_metadata(scenario);
  if (!recomputed.ok()) {
    std::cerr << "error: " << recomputed.error() << "\n";
    return kExitFailure;
  }
  const auto& m = recomputed.value();
  json out{{"id", scenario.id},
           {"category", scenario.category},
           {"constraint_set", to_string(scenario.constraint_set)},
           {"block_count", m.block_count},
           {"stack_positions", m.stack_positions},
           {"misplaced_blocks", m.misplaced_blocks},
           {"min_solution_length",
            m.min_solution_length ? json(*m.min_solution_length) : json()},
           {"length_is_upper_bound", m.length_is_upper_bound},
           {"non_constructive_in_optimal",
            m.non_constructive_in_optimal
                ? json(*m.non_constructive_in_optimal)
                : json()}};
  if (as_json) {
    std::cout << out.dump(2) << "\n";
  } else {
    for (const auto& [key, value] : out.items()) {
      std::cout << key << ": " << value.dump() << "\n";
    }
  }
  return 0;
}

int cmd_render(const ScenarioInput& input) {
  Scenario scenario;
  if (int rc = load_input(input, scenario)) return rc;
  std::cout << scenario.id << " (" << to_string(scenario.constraint_set)
            << ")\n\n";
  std::cout << blocksbench::render_ascii(scenario.initial_state());
  std::cout << "\ngoal: " << scenario.goal.description << "\n";
  return 0;
}

int write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return kExitUsage;
  }
  out << bytes;
  return 0;
}

int cmd_gen_suite(const std::string& out_dir, uint64_t seed) {
  auto suite = blocksbench::generate_suite(seed);
  if (!suite.ok()) {
    std::cerr << "error: " << suite.error() << "\n";
    return kExitFailure;
  }
  for (const Scenario& scenario : suite.value()) {
    auto path = std::filesystem::path(out_dir) / (scenario.id + ".json");
    if (int rc = write_file(path, blocksbench::scenario_to_file_bytes(scenario))) {
      return rc;
    }
    std::cout << scenario.id << ": blocks="
              << scenario.metadata.block_count << " positions="
              << scenario.metadata.stack_positions << " misplaced="
              << scenario.metadata.misplaced_blocks << " min_len="
              << (scenario.metadata.min_solution_length
                      ? std::to_string(*scenario.metadata.min_solution_length)
                      : "null")
              << "\n";
  }
  std::cout << suite.value().size() << " scenarios written to " << out_dir
            << "\n";
  return 0;
}

int cmd_gen_single(const blocksbench::GenSpec& spec, const std::string& out) {
  auto generated = blocksbench::generate_scenario(spec);
  if (!generated.ok()) {
    std::cerr << "error: " << generated.error() << "\n";
    return kExitFailure;
  }
  Scenario scenario = std::move(generated.value());
  if (scenario.id.empty()) {
    scenario.id = "custom/cat" + std::to_string(spec.category) + "-seed" +
                  std::to_string(spec.seed);
  }
  std::string bytes = blocksbench::scenario_to_file_bytes(scenario);
  if (out.empty() || out == "-") {
    std::cout << bytes;
    return 0;
  }
  return write_file(out, bytes);
}

int cmd_validate(const std::string& dir) {
  auto store = ScenarioStore::load_dir(dir);
  if (!store.ok()) {
    std::cerr << "invalid suite: " << store.error() << "\n";
    return kExitFailure;
  }

  int problems = 0;
  // Files must be the canonical serialization, byte for byte.
  for (const Scenario& scenario : store.value().all()) {
    auto path = std::filesystem::path(dir) / (scenario.id + ".json");
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    if (bytes != blocksbench::scenario_to_file_bytes(scenario)) {
      std::cerr << scenario.id << ": file is not in canonical form\n";
      ++problems;
    }
  }
  for (const std::string& problem : blocksbench::validate_suite(store.value())) {
    std::cerr << problem << "\n";
    ++problems;
  }
  if (problems) {
    std::cerr << problems << " problem(s)\n";
    return kExitFailure;
  }
  std::cout << store.value().all().size() << " scenarios valid\n";
  return 0;
}

int cmd_serve(const std::string& dir, const std::string& host, int port,
              double phase_delay) {
  auto store = ScenarioStore::load_dir(dir);
  if (!store.ok()) {
    std::cerr << "error: " << store.error() << "\n";
    return kExitUsage;
  }
  blocksbench::SimService service(std::move(store.value()), phase_delay);
  blocksbench::RestServer server(service);
  std::cerr << "listening on http://" << host << ":" << port << "\n";
  if (!server.listen(host, port)) {
    std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
    return kExitFailure;
  }
  return 0;
}

int cmd_mcp(const std::string& url) {
  blocksbench::HttpUpstream upstream(url);
  blocksbench::McpGateway gateway(upstream);
  return gateway.run_stdio(std::cin, std::cout);
}

std::vector<int> parse_categories(const std::string& csv, bool& ok) {
  std::vector<int> out;
  ok = true;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      int cat = std::stoi(item);
      if (cat < 1 || cat > 5) throw std::out_of_range("category");
      out.push_back(cat);
    } catch (...) {
      ok = false;
      return out;
    }
  }
  return out;
}

int cmd_bench_run(const std::string& dir, const std::string& agents_csv,
                  const std::string& categories_csv,
                  const std::string& transport, const std::string& out_path,
                  const std::string& markdown_path, uint64_t seed) {
  auto store = ScenarioStore::load_dir(dir);
  if (!store.ok()) {
    std::cerr << "error: " << store.error() << "\n";
    return kExitUsage;
  }
  blocksbench::HarnessConfig config;
  config.transport = transport;
  config.seed = seed;
  if (!agents_csv.empty()) {
    config.agents.clear();
    std::stringstream ss(agents_csv);
    std::string item;
    while (std::getline(ss, item, ',')) config.agents.push_back(item);
  }
  if (!categories_csv.empty()) {
    bool ok = true;
    config.categories = parse_categories(categories_csv, ok);
    if (!ok || config.categories.empty()) {
      std::cerr << "error: --categories wants a list like 1,2,5\n";
      return kExitUsage;
    }
  }

  auto report = blocksbench::run_harness(store.value(), config);
  if (!report.ok()) {
    std::cerr << "error: " << report.error() << "\n";
    return kExitUsage;
  }
  std::string bytes = report.value().dump(2) + "\n";
  if (out_path.empty() || out_path == "-") {
    std::cout << bytes;
  } else if (int rc = write_file(out_path, bytes)) {
    return rc;
  }
  if (!markdown_path.empty()) {
    if (int rc = write_file(markdown_path,
                            blocksbench::report_markdown(report.value()))) {
      return rc;
    }
  }

  // Exit 1 when any scored episode came out wrong, so CI can gate on it.
  for (const auto& [agent, cats] : report.value()["summary"].items()) {
    for (const auto& [cat, cell] : cats.items()) {
      if (agent == "greedy") continue;  // scripted baseline, expected to fail
      if (cell["correct"].get<int>() < cell["episodes"].get<int>()) {
        return kExitFailure;
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blocksworld benchmark engine"};
  app.require_subcommand(1);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the REST simulation server");
  std::string serve_dir = "scenarios";
  std::string serve_host = "127.0.0.1";
  int serve_port = blocksbench::default_port();
  double phase_delay = 0.05;
  serve->add_option("--dir", serve_dir, "Scenario suite directory")
      ->capture_default_str();
  serve->add_option("--host", serve_host, "Bind address")
      ->capture_default_str();
  serve->add_option("--port", serve_port,
                    "Port (default: BLOCKSBENCH_PORT or 8350)");
  serve->add_option("--phase-delay", phase_delay,
                    "Seconds spent in picking/releasing phases")
      ->capture_default_str();

  // mcp
  auto* mcp = app.add_subcommand(
      "mcp", "Bridge stdio JSON-RPC tool calls to a REST server");
  std::string mcp_url = blocksbench::default_url();
  mcp->add_option("--url", mcp_url,
                  "Upstream base URL (default: BLOCKSBENCH_URL)");

  // solve / prove-impossible / stats / render
  bool as_json = false;
  bool closure = false;
  ScenarioInput solve_in;
  auto* solve_cmd = app.add_subcommand("solve", "Run the search oracle");
  add_scenario_options(solve_cmd, solve_in);
  solve_cmd->add_flag("--json", as_json, "Machine-readable output");
  solve_cmd->add_flag("--closure", closure,
                      "Skip static prechecks; exhaust the reachable set");

  ScenarioInput prove_in;
  bool prove_json = false;
  auto* prove_cmd = app.add_subcommand(
      "prove-impossible", "Exhaust the reachable set to certify unsolvability");
  add_scenario_options(prove_cmd, prove_in);
  prove_cmd->add_flag("--json", prove_json, "Machine-readable output");

  ScenarioInput stats_in;
  bool stats_json = false;
  auto* stats_cmd =
      app.add_subcommand("stats", "Recompute scenario metadata from scratch");
  add_scenario_options(stats_cmd, stats_in);
  stats_cmd->add_flag("--json", stats_json, "Machine-readable output");

  ScenarioInput render_in;
  auto* render_cmd =
      app.add_subcommand("render", "Draw the initial state as ASCII");
  add_scenario_options(render_cmd, render_in);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate scenarios");
  bool gen_suite = false;
  blocksbench::GenSpec spec;
  std::string gen_out;
  uint64_t suite_seed = blocksbench::kSuiteSeed;
  gen->add_flag("--suite", gen_suite, "Generate the full 50-scenario suite");
  gen->add_option("--out", gen_out,
                  "Output directory (--suite) or file; '-' for stdout");
  gen->add_option("--category", spec.category, "Category 1..5")
      ->check(CLI::Range(1, 5));
  gen->add_option("--blocks", spec.blocks, "Block count (3..20)");
  gen->add_option("--positions", spec.positions, "Table positions (3..6)");
  gen->add_option("--seed", spec.seed, "Generation seed");
  gen->add_option("--variant", spec.variant,
                  "Recipe variant (category specific)");
  gen->add_option("--suite-seed", suite_seed, "Master seed for --suite");

  // validate
  auto* validate = app.add_subcommand("validate", "Audit a scenario suite");
  std::string validate_dir = "scenarios";
  validate->add_option("--dir", validate_dir, "Suite directory")
      ->capture_default_str();

  // bench run
  auto* bench = app.add_subcommand("bench", "Evaluation harness");
  auto* bench_run = bench->add_subcommand("run", "Run scripted agents");
  std::string bench_dir = "scenarios";
  std::string bench_agents;
  std::string bench_categories;
  std::string bench_transport = "direct";
  std::string bench_out;
  std::string bench_markdown;
  uint64_t bench_seed = 0;
  bench_run->add_option("--dir", bench_dir, "Suite directory")
      ->capture_default_str();
  bench_run->add_option("--agent", bench_agents,
                        "Comma list: oracle,reveal,greedy (default all)");
  bench_run->add_option("--categories", bench_categories,
                        "Comma list of categories to include (default all)");
  bench_run->add_option("--transport", bench_transport,
                        "direct, rest or mcp")
      ->capture_default_str();
  bench_run->add_option("--out", bench_out, "Report JSON path ('-' = stdout)");
  bench_run->add_option("--markdown", bench_markdown,
                        "Also write a markdown summary here");
  bench_run->add_option("--seed", bench_seed, "Recorded in the manifest");

  CLI11_PARSE(app, argc, argv);

  if (serve->parsed()) {
    return cmd_serve(serve_dir, serve_host, serve_port, phase_delay);
  }
  if (mcp->parsed()) return cmd_mcp(mcp_url);
  if (solve_cmd->parsed()) return cmd_solve(solve_in, as_json, closure);
  if (prove_cmd->parsed()) return cmd_prove_impossible(prove_in, prove_json);
  if (stats_cmd->parsed()) return cmd_stats(stats_in, stats_json);
  if (render_cmd->parsed()) return cmd_render(render_in);
  if (gen->parsed()) {
    if (gen_suite) {
      return cmd_gen_suite(gen_out.empty() ? "scenarios" : gen_out, suite_seed);
    }
    return cmd_gen_single(spec, gen_out);
  }
  if (validate->parsed()) return cmd_validate(validate_dir);
  if (bench->parsed()) {
    if (!bench_run->parsed()) {
      std::cerr << "error: use 'bench run'\n";
      return kExitUsage;
    }
    return cmd_bench_run(bench_dir, bench_agents, bench_categories,
                         bench_transport, bench_out, bench_markdown,
                         bench_seed);
  }
  return kExitUsage;
}

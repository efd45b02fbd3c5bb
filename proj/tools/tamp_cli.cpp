// tamp: build basis-graph caches, plan, certify and benchmark.
//
// Exit status: 0 success, 2 infeasible specification, 1 any error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tamp/tamp.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

constexpr const char* kFormatHelp = R"(Specification grammar (conjunction of clauses):
  clause   := visit-or | end-or | '!' atom
  visit-or := visit(x) | '(' visit(x) '|' visit(y) ... ')'
  end-or   := end(x)   | '(' end(x) '|' end(y) ... ')'
  e.g.  visit(2) & end(3) & !visit(1)
Environment file: JSON with grid{rows,cols}, obstacles[[r,c]...],
  regions[{name,cells,trajectory_props,final_props}...], agents[[r,c]...], move_cost.
See README.md for details.)";

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw tamp::UsageError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw tamp::UsageError("cannot write " + path.string());
  out << text;
}

// `--spec` is either the text itself or the path of a .spec file.
tamp::BooleanSpec load_spec(const std::string& arg) {
  std::filesystem::path p(arg);
  if (p.extension() == ".spec" || (arg.find('(') == std::string::npos && std::filesystem::is_regular_file(p)))
    return tamp::parse_spec(read_text(p));
  return tamp::parse_spec(arg);
}

std::optional<std::size_t> state_cap_override() {
  const char* v = std::getenv("TAMP_STATE_CAP");
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t pos = 0;
    unsigned long long n = std::stoull(v, &pos);
    if (pos != std::string(v).size() || n == 0) throw std::invalid_argument(v);
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw tamp::UsageError(std::string("TAMP_STATE_CAP must be a positive integer, got '") + v + "'");
  }
}

tamp::PlannerOptions planner_options() {
  tamp::PlannerOptions opts;
  if (auto cap = state_cap_override()) opts.ebrg.state_cap = *cap;
  return opts;
}

tamp::OracleLimits oracle_limits() {
  tamp::OracleLimits limits;
  if (auto cap = state_cap_override()) limits.state_cap = *cap;
  return limits;
}

struct PlanArgs {
  std::string env;
  std::string spec;
  std::string cache;
  std::string out;
  std::string render;
  std::string render_out;
};

int cmd_build(const std::string& env_path, const std::string& out) {
  const tamp::Environment env = tamp::load_env(env_path);
  const tamp::OfflineModel model = tamp::build_offline(env, planner_options());
  tamp::save_cache(model.graph, model.partition, model.monitored.net, out);
  std::cerr << "basis markings: " << model.graph.size() << ", explicit transitions: "
            << model.partition.explicit_transitions.size() << ", cache: " << out << "\n";
  return kExitOk;
}

int cmd_plan(const PlanArgs& a) {
  std::optional<tamp::RenderFormat> format;
  if (!a.render.empty()) format = tamp::parse_render_format(a.render);
  const tamp::Environment env = tamp::load_env(a.env);
  const tamp::BooleanSpec spec = load_spec(a.spec);
  const tamp::PlannerOptions opts = planner_options();
  const tamp::OfflineModel model = a.cache.empty() ? tamp::build_offline(env, opts) : tamp::load_offline(env, a.cache);
  const tamp::PlanResult res = tamp::plan(model, spec, opts);
  if (!res.feasible()) {
    std::cerr << "infeasible (" << tamp::to_string(res.infeasibility->family) << "): " << res.infeasibility->message
              << "\n";
    return kExitInfeasible;
  }
  const std::string json = tamp::dump_plan(*res.plan);
  if (a.out.empty())
    std::cout << json;
  else
    write_text(a.out, json);
  if (format) {
    const std::string doc = tamp::render(env, &*res.plan, *format);
    if (a.render_out.empty())
      std::cout << doc;
    else
      write_text(a.render_out, doc);
  }
  return kExitOk;
}

int cmd_oracle(const std::string& env_path, const std::string& spec_arg) {
  const tamp::Environment env = tamp::load_env(env_path);
  const tamp::BooleanSpec spec = load_spec(spec_arg);
  const tamp::OracleResult r = tamp::joint_search(env, spec, oracle_limits());
  nlohmann::ordered_json j;
  j["feasible"] = r.feasible;
  j["cost"] = r.feasible ? tamp::cost_json(r.cost) : nlohmann::ordered_json();
  j["witness"] = r.witness;
  j["states"] = r.states;
  std::cout << j.dump(2) << "\n";
  return r.feasible ? kExitOk : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal multi-agent task and motion planning over Petri nets"};
  app.footer(kFormatHelp);
  app.require_subcommand(1);

  std::string env_path, out_path, spec_arg;
  auto* build = app.add_subcommand("build", "Build the basis-graph cache for an environment");
  build->add_option("--env", env_path, "Environment JSON file")->required();
  build->add_option("--out", out_path, "Cache file to write")->required();

  PlanArgs pa;
  auto* plan = app.add_subcommand("plan", "Compute an optimal team plan");
  plan->add_option("--env", pa.env, "Environment JSON file")->required();
  plan->add_option("--spec", pa.spec, "Specification text or .spec file")->required();
  plan->add_option("--cache", pa.cache, "Basis-graph cache built by 'build'");
  plan->add_option("--out", pa.out, "Write plan JSON here instead of stdout");
  plan->add_option("--render", pa.render, "Also render the plan: ascii or svg");
  plan->add_option("--render-out", pa.render_out, "Write the rendering here instead of stdout");

  std::string oracle_env, oracle_spec;
  auto* oracle = app.add_subcommand("oracle", "Joint-state reference search (small instances)");
  oracle->add_option("--env", oracle_env, "Environment JSON file")->required();
  oracle->add_option("--spec", oracle_spec, "Specification text or .spec file")->required();

  std::string mode = "agents", bench_out;
  std::uint64_t seed = 1;
  int reps = 0;
  std::vector<int> sides, agents, labels;
  int min_labels = 0, max_labels = 0;
  double density = -1;
  unsigned jobs = 1;
  bool no_oracle = false;
  std::size_t oracle_cap = 0;
  auto* bench = app.add_subcommand("bench", "Seeded random-instance sweep, CSV on stdout");
  bench->add_option("--mode", mode, "agents | size | props")->required();
  bench->add_option("--seed", seed, "Random seed")->required();
  bench->add_option("--reps", reps, "Repetitions per sweep point (default 20)");
  bench->add_option("--sides", sides, "Grid sides to sweep")->delimiter(',');
  bench->add_option("--agents", agents, "Agent counts to sweep")->delimiter(',');
  bench->add_option("--labels", labels, "Fixed labelled-cell counts to sweep")->delimiter(',');
  bench->add_option("--min-labels", min_labels, "Lower end of the labelled-cell range (default 2)");
  bench->add_option("--max-labels", max_labels, "Upper end of the labelled-cell range (default 10)");
  bench->add_option("--obstacles", density, "Obstacle density in [0,1)");
  bench->add_option("--jobs", jobs, "Instances run concurrently (default 1)");
  bench->add_flag("--no-oracle", no_oracle, "Skip the oracle cross-check");
  bench->add_option("--oracle-cap", oracle_cap, "Oracle state budget per instance");
  bench->add_option("--out", bench_out, "Write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitError;
  }

  try {
    if (*build) return cmd_build(env_path, out_path);
    if (*plan) return cmd_plan(pa);
    if (*oracle) return cmd_oracle(oracle_env, oracle_spec);
    if (*bench) {
      tamp::BenchConfig cfg = tamp::BenchConfig::defaults(tamp::parse_bench_mode(mode));
      cfg.seed = seed;
      if (reps) cfg.repetitions = reps;
      if (!sides.empty()) cfg.sides = sides;
      if (!agents.empty()) cfg.agent_counts = agents;
      if (!labels.empty()) cfg.label_counts = labels;
      if (min_labels) cfg.min_labels = min_labels;
      if (max_labels) cfg.max_labels = max_labels;
      if (density >= 0) cfg.obstacle_density = density;
      cfg.jobs = jobs;
      cfg.run_oracle = !no_oracle;
      if (oracle_cap) cfg.oracle_cap = oracle_cap;
      if (auto cap = state_cap_override()) cfg.ebrg_cap = cfg.oracle_cap = *cap;
      const std::string csv = tamp::run_bench(cfg);
      if (bench_out.empty())
        std::cout << csv;
      else
        write_text(bench_out, csv);
      return kExitOk;
    }
  } catch (const tamp::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n\n" << kFormatHelp << "\n";
    return kExitError;
  } catch (const tamp::SyntaxError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << kFormatHelp << "\n";
    return kExitError;
  } catch (const tamp::ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << kFormatHelp << "\n";
    return kExitError;
  } catch (const tamp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

#pragma once

// Seeded random instances and the benchmark sweep behind `tamp bench`.
//
// CSV columns (fixed):
//   kind,k,W,A,draw,feasible,plan_cost,basis_markings,offline_s,online_s,oracle_cost,oracle_equal,error
// `kind` is "instance" for one row per generated instance and "mean" for the
// aggregate over the repetitions of one (k, W, A) point. Costs are exact
// ("n" or "n/d"); empty cells mean "not available".

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tamp/boolspec.hpp"
#include "tamp/environment.hpp"
#include "tamp/error.hpp"
#include "tamp/oracle.hpp"
#include "tamp/planner.hpp"

namespace tamp {

enum class BenchMode { kAgents, kSize, kProps };

inline BenchMode parse_bench_mode(std::string_view s) {
  if (s == "agents") return BenchMode::kAgents;
  if (s == "size") return BenchMode::kSize;
  if (s == "props") return BenchMode::kProps;
  throw UsageError("unknown bench mode '" + std::string(s) + "' (expected agents, size or props)");
}

inline std::string to_string(BenchMode m) {
  switch (m) {
    case BenchMode::kAgents: return "agents";
    case BenchMode::kSize: return "size";
    case BenchMode::kProps: return "props";
  }
  return "?";
}

// Knobs of the random specification. The sweep defaults keep feasibility
// rates useful; none of them comes from a published distribution.
struct SpecKnobs {
  int min_visit_clauses = 1;
  int max_visit_clauses = 3;
  int min_end_clauses = 0;
  int max_end_clauses = 2;
  int max_clause_width = 3;
  int max_forbidden = 2;
};

struct BenchConfig {
  BenchMode mode = BenchMode::kAgents;
  std::vector<int> sides{20};      // square grids W x W
  std::vector<int> agent_counts{3};
  // Labelled-cell count: uniform in [min_labels, max_labels] unless
  // `label_counts` lists fixed values to sweep (props mode).
  int min_labels = 2;
  int max_labels = 10;
  std::vector<int> label_counts;
  std::uint64_t seed = 1;
  int repetitions = 20;
  double obstacle_density = 0.0;
  SpecKnobs spec;
  bool run_oracle = true;
  std::size_t oracle_cap = 200'000;
  std::size_t ebrg_cap = 5'000'000;
  unsigned jobs = 1;

  // Table regimes: agents 20x20 k=1..9, size k=3 W=10..50, props 20x20 k=3 A=4..12.
  static BenchConfig defaults(BenchMode mode) {
    BenchConfig c;
    c.mode = mode;
    switch (mode) {
      case BenchMode::kAgents:
        c.sides = {20};
        c.agent_counts = {1, 2, 3, 4, 5, 6, 7, 8, 9};
        break;
      case BenchMode::kSize:
        c.sides = {10, 15, 20, 25, 30, 35, 40, 45, 50};
        c.agent_counts = {3};
        break;
      case BenchMode::kProps:
        c.sides = {20};
        c.agent_counts = {3};
        c.label_counts = {4, 5, 6, 7, 8, 9, 10, 11, 12};
        break;
    }
    return c;
  }
};

inline void validate(const BenchConfig& c) {
  if (c.repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (c.sides.empty() || c.agent_counts.empty()) throw ConfigError("grid sides and agent counts must be non-empty");
  for (int s : c.sides)
    if (s < 1) throw ConfigError("grid side must be positive");
  for (int k : c.agent_counts)
    if (k < 1) throw ConfigError("agent count must be positive");
  if (c.label_counts.empty() && (c.min_labels < 1 || c.max_labels < c.min_labels))
    throw ConfigError("label range must be non-empty with a positive lower bound");
  for (int a : c.label_counts)
    if (a < 1) throw ConfigError("label count must be positive");
  if (c.obstacle_density < 0.0 || c.obstacle_density >= 1.0) throw ConfigError("obstacle density must be in [0,1)");
  const auto& k = c.spec;
  if (k.min_visit_clauses < 0 || k.max_visit_clauses < k.min_visit_clauses || k.min_end_clauses < 0 ||
      k.max_end_clauses < k.min_end_clauses || k.max_clause_width < 1 || k.max_forbidden < 0)
    throw ConfigError("spec knobs out of range");
  if (c.jobs < 1) throw ConfigError("jobs must be at least 1");
}

// One point of the sweep (fixed k, W and, in props mode, A).
struct BenchPoint {
  int side = 0;
  int agents = 0;
  std::optional<int> labels;
};

inline std::vector<BenchPoint> bench_points(const BenchConfig& c) {
  std::vector<BenchPoint> out;
  std::vector<std::optional<int>> label_options;
  if (c.label_counts.empty())
    label_options.push_back(std::nullopt);
  else
    label_options.assign(c.label_counts.begin(), c.label_counts.end());
  for (int s : c.sides)
    for (int k : c.agent_counts)
      for (const auto& a : label_options) out.push_back({s, k, a});
  return out;
}

struct Instance {
  Environment env;
  BooleanSpec spec;
};

namespace detail {

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline BooleanSpec random_spec(std::mt19937_64& rng, int labels, const SpecKnobs& knobs) {
  const int width_cap = std::min(knobs.max_clause_width, labels);
  auto clause = [&]() {
    std::vector<int> ids(static_cast<std::size_t>(labels));
    std::iota(ids.begin(), ids.end(), 1);
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(static_cast<std::size_t>(uniform_int(rng, 1, width_cap)));
    std::vector<std::string> names;
    for (int i : ids) names.push_back(std::to_string(i));
    std::sort(names.begin(), names.end());
    return names;
  };
  BooleanSpec spec;
  const int nv = uniform_int(rng, knobs.min_visit_clauses, knobs.max_visit_clauses);
  for (int i = 0; i < nv; ++i) spec.trajectory_clauses.push_back(clause());
  const int ne = uniform_int(rng, knobs.min_end_clauses, knobs.max_end_clauses);
  for (int i = 0; i < ne; ++i) spec.final_clauses.push_back(clause());

  auto mentions = [](const std::vector<std::vector<std::string>>& clauses, const std::string& n) {
    for (const auto& c : clauses)
      if (std::find(c.begin(), c.end(), n) != c.end()) return true;
    return false;
  };
  const int nf = uniform_int(rng, 0, knobs.max_forbidden);
  for (int i = 0; i < nf; ++i) {
    Atom a{uniform_int(rng, 0, 1) == 0 ? AtomKind::kVisit : AtomKind::kEnd, std::to_string(uniform_int(rng, 1, labels))};
    // A negation of an atom that also appears positively is contradictory; skip it.
    if (mentions(a.kind == AtomKind::kVisit ? spec.trajectory_clauses : spec.final_clauses, a.name)) continue;
    if (std::find(spec.forbidden.begin(), spec.forbidden.end(), a) != spec.forbidden.end()) continue;
    spec.forbidden.push_back(a);
  }
  // Canonical form: the parser sorts and deduplicates clauses.
  return parse_spec(print_spec(spec));
}

}  // namespace detail

// Instance `draw` of a sweep point. Every labelled cell j gets its own region
// named "j" carrying j as both a trajectory and a final proposition.
inline Instance random_instance(const BenchConfig& cfg, const BenchPoint& point, std::uint64_t draw) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(draw >> 32),
                    static_cast<std::uint32_t>(point.side), static_cast<std::uint32_t>(point.agents),
                    static_cast<std::uint32_t>(point.labels.value_or(0))};
  std::mt19937_64 rng(seq);

  const int labels = point.labels ? *point.labels : detail::uniform_int(rng, cfg.min_labels, cfg.max_labels);
  Instance inst;
  Environment& env = inst.env;
  env.rows = env.cols = point.side;

  std::vector<Cell> cells;
  for (int r = 0; r < point.side; ++r)
    for (int c = 0; c < point.side; ++c) cells.push_back({r, c});
  std::shuffle(cells.begin(), cells.end(), rng);
  const auto n_obst = static_cast<std::size_t>(cfg.obstacle_density * static_cast<double>(cells.size()));
  if (cells.size() - n_obst < static_cast<std::size_t>(labels))
    throw ConfigError(std::to_string(labels) + " labelled cells do not fit in " + std::to_string(cells.size() - n_obst) +
                      " free cells");
  env.obstacles.assign(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(n_obst));
  std::sort(env.obstacles.begin(), env.obstacles.end());
  std::vector<Cell> free(cells.begin() + static_cast<std::ptrdiff_t>(n_obst), cells.end());
  for (int j = 1; j <= labels; ++j) {
    const std::string name = std::to_string(j);
    env.regions.push_back({name, {free[static_cast<std::size_t>(j - 1)]}, {name}, {name}});
  }
  std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
  for (int a = 0; a < point.agents; ++a) env.agents.push_back(free[pick(rng)]);
  validate(env);
  inst.spec = detail::random_spec(rng, labels, cfg.spec);
  return inst;
}

struct BenchRow {
  int k = 0;
  int side = 0;
  int labels = 0;
  std::uint64_t draw = 0;
  std::optional<bool> feasible;
  std::optional<Cost> plan_cost;
  std::optional<std::size_t> basis_markings;
  double offline_s = 0;
  double online_s = 0;
  std::optional<bool> oracle_feasible;
  std::optional<Cost> oracle_cost;
  std::string error;

  std::optional<bool> oracle_equal() const {
    if (!feasible || !oracle_feasible) return std::nullopt;
    if (*feasible != *oracle_feasible) return false;
    return !*feasible || *plan_cost == *oracle_cost;
  }
};

inline BenchRow run_instance(const BenchConfig& cfg, const BenchPoint& point, std::uint64_t draw) {
  using Clock = std::chrono::steady_clock;
  BenchRow row;
  row.k = point.agents;
  row.side = point.side;
  row.draw = draw;
  try {
    Instance inst = random_instance(cfg, point, draw);
    row.labels = static_cast<int>(inst.env.regions.size());
    PlannerOptions opts;
    opts.ebrg.state_cap = cfg.ebrg_cap;
    auto t0 = Clock::now();
    OfflineModel model = build_offline(inst.env, opts);
    auto t1 = Clock::now();
    PlanResult res = plan(model, inst.spec, opts);
    auto t2 = Clock::now();
    row.offline_s = std::chrono::duration<double>(t1 - t0).count();
    row.online_s = std::chrono::duration<double>(t2 - t1).count();
    row.basis_markings = model.graph.size();
    row.feasible = res.feasible();
    if (res.plan) row.plan_cost = res.plan->total_cost;
    if (cfg.run_oracle) {
      try {
        OracleResult o = joint_search(inst.env, inst.spec, {cfg.oracle_cap});
        row.oracle_feasible = o.feasible;
        if (o.feasible) row.oracle_cost = o.cost;
      } catch (const ResourceError&) {
        // Beyond the oracle budget: no certificate for this row.
      }
    }
  } catch (const Error& e) {
    row.error = e.what();
  } catch (const std::bad_alloc&) {
    row.error = "out of memory";
  }
  return row;
}

inline constexpr const char* kBenchHeader =
    "kind,k,W,A,draw,feasible,plan_cost,basis_markings,offline_s,online_s,oracle_cost,oracle_equal,error";

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

inline std::string seconds(double s) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(6) << s;
  return o.str();
}

}  // namespace detail

// Runs every (point, repetition) pair, `cfg.jobs` instances at a time. Rows
// come out in sweep order regardless of scheduling.
inline std::vector<BenchRow> run_bench_rows(const BenchConfig& cfg) {
  validate(cfg);
  const auto points = bench_points(cfg);
  const auto reps = static_cast<std::size_t>(cfg.repetitions);
  std::vector<BenchRow> rows(points.size() * reps);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) rows[i] = run_instance(cfg, points[i / reps], i % reps);
  };
  const unsigned jobs = std::min<unsigned>(cfg.jobs, static_cast<unsigned>(rows.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return rows;
}

inline std::string bench_csv(const BenchConfig& cfg, const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << kBenchHeader << '\n';
  auto opt = [](const auto& v, auto f) { return v ? f(*v) : std::string(); };
  auto cost = [](const Cost& c) { return to_string(c); };
  auto flag = [](bool b) { return std::string(b ? "1" : "0"); };
  const auto reps = static_cast<std::size_t>(cfg.repetitions);
  for (std::size_t start = 0; start < rows.size(); start += reps) {
    for (std::size_t i = start; i < start + reps; ++i) {
      const BenchRow& r = rows[i];
      out << "instance," << r.k << ',' << r.side << ',' << r.labels << ',' << r.draw << ','
          << opt(r.feasible, flag) << ',' << opt(r.plan_cost, cost) << ','
          << opt(r.basis_markings, [](std::size_t n) { return std::to_string(n); }) << ','
          << detail::seconds(r.offline_s) << ',' << detail::seconds(r.online_s) << ','
          << opt(r.oracle_cost, cost) << ',' << opt(r.oracle_equal(), flag) << ',' << detail::csv_field(r.error)
          << '\n';
    }
    // Means over rows that completed; plan cost over the feasible ones.
    Cost cost_sum = 0;
    std::size_t n_cost = 0, n_ok = 0, n_feasible = 0, n_eq = 0, n_cert = 0;
    double labels = 0, markings = 0, off = 0, on = 0;
    for (std::size_t i = start; i < start + reps; ++i) {
      const BenchRow& r = rows[i];
      if (!r.error.empty()) continue;
      ++n_ok;
      labels += r.labels;
      markings += static_cast<double>(r.basis_markings.value_or(0));
      off += r.offline_s;
      on += r.online_s;
      if (r.feasible && *r.feasible) ++n_feasible;
      if (r.plan_cost) {
        cost_sum += *r.plan_cost;
        ++n_cost;
      }
      if (auto eq = r.oracle_equal()) {
        ++n_cert;
        n_eq += *eq;
      }
    }
    const BenchRow& f = rows[start];
    out << "mean," << f.k << ',' << f.side << ',';
    if (n_ok == 0) {
      out << ",,,,,,,,,all repetitions failed\n";
      continue;
    }
    const double d = static_cast<double>(n_ok);
    std::ostringstream a;
    a << std::setprecision(4) << labels / d;
    out << a.str() << ",," << detail::seconds(static_cast<double>(n_feasible) / d) << ','
        << (n_cost ? to_string(cost_sum / static_cast<std::int64_t>(n_cost)) : "") << ','
        << std::llround(markings / d) << ',' << detail::seconds(off / d) << ',' << detail::seconds(on / d) << ",,"
        << (n_cert ? flag(n_eq == n_cert) : "") << ",\n";
  }
  return out.str();
}

inline std::string run_bench(const BenchConfig& cfg) { return bench_csv(cfg, run_bench_rows(cfg)); }

}  // namespace tamp

#pragma once

// Online planning over a prebuilt basis graph: pick the cheapest basis
// marking that satisfies the specification, walk its parent links back to
// the root, lift the abstract run to the grid and split it per agent.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tamp/abstraction.hpp"
#include "tamp/boolspec.hpp"
#include "tamp/cache.hpp"
#include "tamp/ebrg.hpp"
#include "tamp/environment.hpp"
#include "tamp/error.hpp"
#include "tamp/petri_net.hpp"

namespace tamp {

// Tokens sitting on a place with a forbidden end label at the target can
// leave it with one move onto an unlabelled neighbour. `cost[p]` is that move's
// price for mobility place p (nullopt: no such neighbour).
struct ExitPolicy {
  std::size_t mobility_places = 0;
  std::vector<std::optional<Cost>> cost;
};

inline ExitPolicy exit_policy(const SimplifiedNet& s) {
  ExitPolicy policy;
  policy.mobility_places = s.q_place.size();
  for (const auto& e : s.exits) policy.cost.push_back(e ? std::optional<Cost>(e->cost) : std::nullopt);
  return policy;
}

struct TargetSelection {
  std::size_t marking_index = 0;
  Cost cost = 0;        // graph cost plus exit moves
  Cost graph_cost = 0;  // q of the selected basis marking
  std::vector<std::pair<PlaceId, Count>> exits;

  friend bool operator==(const TargetSelection&, const TargetSelection&) = default;
};

namespace detail {

inline void check_dimensions(const BasisGraph& b, const SpecVectors& v) {
  auto check = [&](const std::vector<std::uint8_t>& x) {
    if (x.size() != b.width())
      throw DomainError("spec vector has " + std::to_string(x.size()) + " entries, graph markings have " +
                        std::to_string(b.width()));
  };
  for (const auto& z : v.z) check(z);
  for (const auto& d : v.d) check(d);
  check(v.g);
}

// Cost of satisfying `v` at marking `m` of cost `q`, or nullopt.
inline std::optional<Cost> target_cost(std::span<const Count> m, const Cost& q, const SpecVectors& v,
                                       const ExitPolicy* exits, std::vector<std::pair<PlaceId, Count>>* moved) {
  Cost total = q;
  if (moved) moved->clear();
  for (std::size_t p = 0; p < m.size(); ++p) {
    if (!v.g[p] || m[p] == 0) continue;
    if (!exits || p >= exits->mobility_places || !exits->cost[p]) return std::nullopt;
    total += *exits->cost[p] * static_cast<std::int64_t>(m[p]);
    if (moved) moved->push_back({static_cast<PlaceId>(p), m[p]});
  }
  for (const auto& z : v.z)
    if (dot(z, m) < 1) return std::nullopt;
  for (const auto& d : v.d) {
    std::int64_t s = 0;
    for (std::size_t p = 0; p < m.size(); ++p)
      if (d[p] && !v.g[p]) s += m[p];
    if (s < 1) return std::nullopt;
  }
  return total;
}

}  // namespace detail

// Exact scan over basis markings: minimum cost subject to
//   z_i . M >= 1, d_j . M >= 1, g . M <= 0,
// ties broken by the smallest marking index. With an exit policy, tokens on
// forbidden end places may instead step off, at the exit move's cost.
inline std::optional<TargetSelection> select_target(const BasisGraph& b, const SpecVectors& v,
                                                     const ExitPolicy* exits = nullptr) {
  detail::check_dimensions(b, v);
  std::optional<TargetSelection> best;
  std::vector<std::pair<PlaceId, Count>> moved;
  for (std::size_t i = 0; i < b.size(); ++i) {
    auto c = detail::target_cost(b.counts(i), b.cost(i), v, exits, &moved);
    if (!c) continue;
    if (!best || *c < best->cost) best = TargetSelection{i, *c, b.cost(i), moved};
  }
  return best;
}

enum class ConstraintFamily { kTrajectory, kFinal, kForbidden, kCombined };

inline std::string to_string(ConstraintFamily f) {
  switch (f) {
    case ConstraintFamily::kTrajectory: return "trajectory";
    case ConstraintFamily::kFinal: return "final";
    case ConstraintFamily::kForbidden: return "forbidden";
    case ConstraintFamily::kCombined: return "combined";
  }
  return "?";
}

struct Infeasibility {
  ConstraintFamily family = ConstraintFamily::kCombined;
  std::string message;
};

// Names the first constraint family that no basis marking satisfies on its own.
inline Infeasibility diagnose(const BasisGraph& b, const SpecVectors& v, const ExitPolicy* exits = nullptr) {
  SpecVectors only;
  only.g.assign(b.width(), 0);
  auto satisfiable = [&](const SpecVectors& sv) {
    for (std::size_t i = 0; i < b.size(); ++i)
      if (detail::target_cost(b.counts(i), b.cost(i), sv, exits, nullptr)) return true;
    return false;
  };
  only.z = v.z;
  if (!satisfiable(only)) return {ConstraintFamily::kTrajectory, "no reachable state covers every visit clause"};
  only.z.clear();
  only.d = v.d;
  if (!satisfiable(only)) return {ConstraintFamily::kFinal, "no reachable state covers every end clause"};
  only.d.clear();
  only.g = v.g;
  if (!satisfiable(only)) return {ConstraintFamily::kForbidden, "every reachable state violates a negated atom"};
  return {ConstraintFamily::kCombined, "clauses are individually satisfiable but not jointly"};
}

// Orders the implicit firings of `y` by repeatedly firing the smallest enabled
// transition that still has a remaining count.
inline std::vector<TransitionId> linearize_explanation(const PetriNet& net, const BasisPartition& part, const Marking& m,
                                                       const FiringVector& y) {
  std::vector<std::pair<TransitionId, Count>> remaining(y.entries().begin(), y.entries().end());
  for (const auto& [t, n] : remaining)
    if (t >= part.is_explicit.size() || part.is_explicit[t])
      throw IntegrityError("explanation uses non-implicit transition " + std::to_string(t));
  std::vector<TransitionId> out;
  Marking cur = m;
  Count left = y.total();
  while (left > 0) {
    bool fired = false;
    for (auto& [t, n] : remaining) {
      if (n == 0 || !enabled(net, cur, t)) continue;
      cur = fire(net, cur, t);
      out.push_back(t);
      --n;
      --left;
      fired = true;
      break;
    }
    if (!fired) throw IntegrityError("explanation vector is not firable from its marking");
  }
  return out;
}

// Transition sequence of the monitored net from the root to `target`.
inline std::vector<TransitionId> backtrack(const BasisGraph& b, std::size_t target, const PetriNet& net,
                                           const BasisPartition& part) {
  if (target >= b.size()) throw DomainError("target index out of range");
  std::vector<std::size_t> chain;
  for (std::size_t i = target; i != BasisGraph::root(); i = b.edge(i).parent) {
    chain.push_back(i);
    if (chain.size() > b.size()) throw IntegrityError("parent links contain a cycle");
  }
  std::vector<TransitionId> out;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    const BasisEdge& e = b.edge(*it);
    auto implicit = linearize_explanation(net, part, b.marking(e.parent), e.explanation);
    out.insert(out.end(), implicit.begin(), implicit.end());
    out.push_back(e.transition);
  }
  return out;
}

// Assigns every move of `sigma` to the lowest-indexed agent currently on the
// move's source place. `starts` lists each agent's start place.
inline std::vector<std::vector<PlaceId>> decompose_agents(const PetriNet& q, std::span<const TransitionId> sigma,
                                                          std::span<const PlaceId> starts) {
  std::vector<std::vector<PlaceId>> paths;
  std::vector<PlaceId> pos(starts.begin(), starts.end());
  for (PlaceId p : pos) paths.push_back({p});
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    TransitionId t = sigma[i];
    q.check_transition(t);
    if (q.inputs(t).size() != 1 || q.outputs(t).size() != 1)
      throw IntegrityError("transition " + std::to_string(t) + " is not a single-agent move");
    PlaceId from = q.inputs(t)[0];
    PlaceId to = q.outputs(t)[0];
    bool moved = false;
    for (std::size_t a = 0; a < pos.size(); ++a) {
      if (pos[a] != from) continue;
      pos[a] = to;
      paths[a].push_back(to);
      moved = true;
      break;
    }
    if (!moved) throw IntegrityError("step " + std::to_string(i) + ": no agent on place " + std::to_string(from));
  }
  return paths;
}

// Agents ordered by start place, one per token of `m0`.
inline std::vector<std::vector<PlaceId>> decompose_agents(const PetriNet& q, std::span<const TransitionId> sigma,
                                                          const Marking& m0) {
  std::vector<PlaceId> starts;
  for (PlaceId p = 0; p < m0.size(); ++p)
    for (Count n = 0; n < m0[p]; ++n) starts.push_back(p);
  return decompose_agents(q, sigma, starts);
}

struct PlannerOptions {
  EbrgOptions ebrg;
  bool exit_moves = true;
};

// Everything computed before a specification is known.
struct OfflineModel {
  GridNet grid;
  SimplifiedNet simplified;
  MonitoredNet monitored;
  BasisPartition partition;
  BasisGraph graph;
};

inline OfflineModel prepare_offline(const Environment& env) {
  OfflineModel m;
  m.grid = env_to_pn(env);
  m.simplified = build_simplified(m.grid.net);
  m.monitored = build_monitored(m.simplified);
  m.partition = choose_partition(m.monitored);
  return m;
}

inline OfflineModel build_offline(const Environment& env, const PlannerOptions& opts = {}) {
  OfflineModel m = prepare_offline(env);
  m.graph = build_ebrg(m.monitored, m.partition, opts.ebrg);
  return m;
}

inline OfflineModel load_offline(const Environment& env, const std::filesystem::path& cache) {
  OfflineModel m = prepare_offline(env);
  LoadedCache loaded = load_cache(cache, m.monitored.net);
  if (!(loaded.partition == m.partition))
    throw CacheError(CacheError::Kind::kFormat, "cached partition differs from the one derived for this environment");
  m.graph = std::move(loaded.graph);
  return m;
}

struct PlanResult {
  std::optional<Plan> plan;
  std::optional<Infeasibility> infeasibility;
  std::optional<TargetSelection> target;
  std::vector<TransitionId> abstract_run;  // in the monitored (= simplified) net
  std::vector<TransitionId> exit_moves;    // grid transitions appended after the lifted run

  bool feasible() const { return plan.has_value(); }
};

inline PlanResult plan(const OfflineModel& model, const BooleanSpec& spec, const PlannerOptions& opts = {}) {
  PlanResult result;
  const SpecVectors v = compile_vectors(spec, model.monitored.net, model.monitored.indicator_of);
  const ExitPolicy policy = exit_policy(model.simplified);
  const ExitPolicy* exits = opts.exit_moves ? &policy : nullptr;

  result.target = select_target(model.graph, v, exits);
  if (!result.target) {
    result.infeasibility = diagnose(model.graph, v, exits);
    return result;
  }
  const TargetSelection& sel = *result.target;
  result.abstract_run = backtrack(model.graph, sel.marking_index, model.monitored.net, model.partition);

  std::vector<TransitionId> run = lift(model.simplified, result.abstract_run);
  for (const auto& [p, n] : sel.exits)
    for (Count i = 0; i < n; ++i) result.exit_moves.push_back(model.simplified.exits[p]->transition);
  run.insert(run.end(), result.exit_moves.begin(), result.exit_moves.end());

  const PetriNet& q = model.grid.net;
  ReplayTrace trace = replay(q, q.initial_marking(), run);
  Plan p;
  p.team_sequence = run;
  p.total_cost = sequence_cost(q, run);
  if (p.total_cost != sel.cost)
    throw IntegrityError("lifted run costs " + to_string(p.total_cost) + ", graph promised " + to_string(sel.cost));
  for (const auto& path : decompose_agents(q, run, model.grid.agent_places)) {
    std::vector<Cell> cells;
    for (PlaceId pl : path) cells.push_back(model.grid.cell_of(pl));
    p.per_agent_paths.push_back(std::move(cells));
  }
  p.satisfied_atoms = satisfied_atoms(trace.word, trace.final_marking, q);
  if (!holds(spec, trace.word, trace.final_marking, q)) throw IntegrityError("planned run does not satisfy the spec");
  result.plan = std::move(p);
  return result;
}

}  // namespace tamp

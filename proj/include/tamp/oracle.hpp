#pragma once

// Reference solvers used to certify the planner. They share only the net and
// environment types with the planning pipeline.
//
//  * joint_search: uniform-cost search over (sorted agent cells, visited bits)
//    of the grid net itself.
//  * exhaustive_explanations / full_brg_reference: the complete basis
//    reachability relation with every edge kept, labelled by a
//    label-correcting shortest-path pass.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tamp/boolspec.hpp"
#include "tamp/ebrg.hpp"
#include "tamp/environment.hpp"
#include "tamp/error.hpp"
#include "tamp/petri_net.hpp"

namespace tamp {

struct OracleLimits {
  std::size_t state_cap = 1'000'000;
};

struct OracleResult {
  bool feasible = false;
  Cost cost = 0;
  std::vector<TransitionId> witness;  // grid-net transitions
  std::size_t states = 0;
};

inline OracleResult joint_search(const Environment& env, const BooleanSpec& spec, const OracleLimits& limits = {}) {
  const GridNet grid = env_to_pn(env);
  const PetriNet& q = grid.net;
  const std::size_t np = q.place_count();

  auto bound = [&](const Atom& a) {
    for (PlaceId p = 0; p < np; ++p)
      if (contains(q.labels(p), a)) return true;
    return false;
  };
  std::map<std::string, unsigned> bit_of;
  for (const auto& clause : spec.trajectory_clauses)
    for (const auto& name : clause) {
      if (!bound({AtomKind::kVisit, name})) throw UnknownPropositionError(to_string(Atom{AtomKind::kVisit, name}));
      bit_of.emplace(name, 0);
    }
  if (bit_of.size() > 64) throw DomainError("more than 64 distinct visit atoms");
  unsigned next_bit = 0;
  for (auto& [name, bit] : bit_of) bit = next_bit++;
  for (const auto& clause : spec.final_clauses)
    for (const auto& name : clause)
      if (!bound({AtomKind::kEnd, name})) throw UnknownPropositionError(to_string(Atom{AtomKind::kEnd, name}));
  for (const Atom& a : spec.forbidden)
    if (!bound(a)) throw UnknownPropositionError(to_string(a));

  std::vector<std::uint64_t> bits(np, 0);
  std::vector<bool> no_entry(np, false);
  std::vector<bool> no_stay(np, false);
  for (PlaceId p = 0; p < np; ++p)
    for (const Atom& a : q.labels(p)) {
      if (a.kind == AtomKind::kVisit)
        if (auto it = bit_of.find(a.name); it != bit_of.end()) bits[p] |= std::uint64_t{1} << it->second;
      if (std::find(spec.forbidden.begin(), spec.forbidden.end(), a) != spec.forbidden.end())
        (a.kind == AtomKind::kVisit ? no_entry : no_stay)[p] = true;
    }
  std::vector<std::uint64_t> clause_masks;
  for (const auto& clause : spec.trajectory_clauses) {
    std::uint64_t m = 0;
    for (const auto& name : clause) m |= std::uint64_t{1} << bit_of.at(name);
    clause_masks.push_back(m);
  }
  std::vector<std::vector<bool>> final_ok;
  for (const auto& clause : spec.final_clauses) {
    std::vector<bool> ok(np, false);
    for (PlaceId p = 0; p < np; ++p)
      for (const auto& name : clause) ok[p] = ok[p] || contains(q.labels(p), Atom{AtomKind::kEnd, name});
    final_ok.push_back(std::move(ok));
  }

  // State row: k sorted places followed by the visited bits as two words.
  const std::size_t k = grid.agent_places.size();
  const std::size_t width = k + 2;
  std::vector<std::uint32_t> arena;
  std::vector<Cost> dist;
  std::vector<std::pair<std::uint32_t, TransitionId>> parent;
  auto row = [&](std::size_t i) { return arena.data() + i * width; };
  struct RowHash {
    const std::vector<std::uint32_t>* arena;
    std::size_t width;
    std::size_t operator()(std::uint32_t i) const {
      return hash_counts({arena->data() + i * width, width});
    }
  };
  struct RowEq {
    const std::vector<std::uint32_t>* arena;
    std::size_t width;
    bool operator()(std::uint32_t a, std::uint32_t b) const {
      return std::equal(arena->data() + a * width, arena->data() + (a + 1) * width, arena->data() + b * width);
    }
  };
  std::unordered_set<std::uint32_t, RowHash, RowEq> index(1024, RowHash{&arena, width}, RowEq{&arena, width});

  OracleResult result;
  std::vector<std::uint32_t> start(grid.agent_places.begin(), grid.agent_places.end());
  std::sort(start.begin(), start.end());
  std::uint64_t start_bits = 0;
  for (auto p : start) {
    if (no_entry[p]) return result;  // a forbidden region is occupied from the outset
    start_bits |= bits[p];
  }
  start.push_back(static_cast<std::uint32_t>(start_bits & 0xffffffffu));
  start.push_back(static_cast<std::uint32_t>(start_bits >> 32));
  arena.insert(arena.end(), start.begin(), start.end());
  dist.push_back(Cost(0));
  parent.push_back({0, 0});
  index.insert(0);

  auto is_goal = [&](const std::uint32_t* s) {
    std::uint64_t b = std::uint64_t{s[k]} | (std::uint64_t{s[k + 1]} << 32);
    for (std::uint64_t m : clause_masks)
      if ((b & m) == 0) return false;
    for (std::size_t a = 0; a < k; ++a)
      if (no_stay[s[a]]) return false;
    for (const auto& ok : final_ok) {
      bool any = false;
      for (std::size_t a = 0; a < k && !any; ++a) any = ok[s[a]];
      if (!any) return false;
    }
    return true;
  };

  using Item = std::pair<Cost, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  open.push({Cost(0), 0});
  std::vector<bool> closed{false};
  std::vector<std::uint32_t> scratch(width);
  while (!open.empty()) {
    auto [d, idx] = open.top();
    open.pop();
    if (closed[idx] || d != dist[idx]) continue;
    closed[idx] = true;
    if (is_goal(row(idx))) {
      result.feasible = true;
      result.cost = d;
      for (std::uint32_t i = idx; i != 0; i = parent[i].first) result.witness.push_back(parent[i].second);
      std::reverse(result.witness.begin(), result.witness.end());
      result.states = dist.size();
      return result;
    }
    const std::vector<std::uint32_t> cur(row(idx), row(idx) + width);
    const std::uint64_t cur_bits = std::uint64_t{cur[k]} | (std::uint64_t{cur[k + 1]} << 32);
    for (std::size_t a = 0; a < k; ++a) {
      if (a > 0 && cur[a] == cur[a - 1]) continue;  // agents are interchangeable
      for (TransitionId t : q.consumers(cur[a])) {
        PlaceId to = q.outputs(t)[0];
        if (no_entry[to]) continue;
        std::copy(cur.begin(), cur.end(), scratch.begin());
        scratch[a] = to;
        std::sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k));
        std::uint64_t nb = cur_bits | bits[to];
        scratch[k] = static_cast<std::uint32_t>(nb & 0xffffffffu);
        scratch[k + 1] = static_cast<std::uint32_t>(nb >> 32);
        const Cost nd = d + q.cost(t);
        auto probe = static_cast<std::uint32_t>(dist.size());
        arena.insert(arena.end(), scratch.begin(), scratch.end());
        auto [it, inserted] = index.insert(probe);
        if (inserted) {
          dist.push_back(nd);
          parent.push_back({idx, t});
          closed.push_back(false);
          open.push({nd, probe});
          if (dist.size() > limits.state_cap)
            throw ResourceError(limits.state_cap,
                                "joint search exceeded the state cap of " + std::to_string(limits.state_cap));
          continue;
        }
        arena.resize(arena.size() - width);
        if (!closed[*it] && nd < dist[*it]) {
          dist[*it] = nd;
          parent[*it] = {idx, t};
          open.push({nd, *it});
        }
      }
    }
  }
  result.states = dist.size();
  return result;
}

struct ExhaustiveExplanation {
  FiringVector vector;
  std::vector<TransitionId> sequence;  // one implicit sequence realising it
};

// Enumerates every implicit firing sequence from `m` (the implicit subnet is
// acyclic, so there are finitely many) and keeps the Pareto-minimal firing
// vectors of those after which `t` is enabled.
inline std::vector<ExhaustiveExplanation> exhaustive_explanations(const PetriNet& net, const BasisPartition& part,
                                                                  const Marking& m, TransitionId t,
                                                                  std::size_t node_cap = 2'000'000) {
  std::map<FiringVector, std::vector<TransitionId>> enabling;
  std::size_t nodes = 0;
  std::vector<TransitionId> seq;
  std::function<void(const Marking&)> dfs = [&](const Marking& cur) {
    if (++nodes > node_cap) throw ResourceError(node_cap, "explanation enumeration exceeded node cap");
    if (enabled(net, cur, t)) enabling.emplace(FiringVector::of(seq), seq);
    for (TransitionId u : part.implicit_transitions) {
      if (!enabled(net, cur, u)) continue;
      seq.push_back(u);
      dfs(fire(net, cur, u));
      seq.pop_back();
    }
  };
  dfs(m);
  std::vector<ExhaustiveExplanation> out;
  for (const auto& [y, s] : enabling) {
    bool minimal = true;
    for (const auto& [other, unused] : enabling)
      if (!(other == y) && other.dominated_by(y)) minimal = false;
    if (minimal) out.push_back({y, s});
  }
  return out;
}

struct ReferenceBrg {
  struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    TransitionId transition = 0;
    FiringVector explanation;
    Cost cost = 0;
  };
  std::vector<Marking> markings;  // markings[0] is the initial marking
  std::vector<Edge> edges;
  std::vector<Cost> labels;  // min accumulated cost per marking

  std::optional<std::size_t> find(const Marking& m) const {
    for (std::size_t i = 0; i < markings.size(); ++i)
      if (markings[i] == m) return i;
    return std::nullopt;
  }
};

inline ReferenceBrg full_brg_reference(const PetriNet& net, const BasisPartition& part,
                                       std::size_t state_cap = 100'000) {
  ReferenceBrg ref;
  std::unordered_map<Marking, std::size_t, MarkingHash> index;
  ref.markings.push_back(net.initial_marking());
  index.emplace(net.initial_marking(), 0);
  for (std::size_t i = 0; i < ref.markings.size(); ++i) {
    const Marking here = ref.markings[i];
    for (TransitionId t : part.explicit_transitions) {
      for (const auto& ex : exhaustive_explanations(net, part, here, t)) {
        Marking next = here;
        for (TransitionId u : ex.sequence) next = fire(net, next, u);
        next = fire(net, next, t);
        auto [it, inserted] = index.emplace(next, ref.markings.size());
        if (inserted) {
          ref.markings.push_back(next);
          if (ref.markings.size() > state_cap)
            throw ResourceError(state_cap, "reference BRG exceeded " + std::to_string(state_cap) + " markings");
        }
        ref.edges.push_back({i, it->second, t, ex.vector, vector_cost(net, ex.vector) + net.cost(t)});
      }
    }
  }

  // Label-correcting shortest paths over the full relation.
  std::vector<std::vector<std::size_t>> out_edges(ref.markings.size());
  for (std::size_t e = 0; e < ref.edges.size(); ++e) out_edges[ref.edges[e].from].push_back(e);
  std::vector<std::optional<Cost>> label(ref.markings.size());
  std::vector<bool> queued(ref.markings.size(), false);
  std::deque<std::size_t> work{0};
  label[0] = Cost(0);
  queued[0] = true;
  while (!work.empty()) {
    std::size_t v = work.front();
    work.pop_front();
    queued[v] = false;
    for (std::size_t e : out_edges[v]) {
      const auto& edge = ref.edges[e];
      Cost c = *label[v] + edge.cost;
      if (!label[edge.to] || c < *label[edge.to]) {
        label[edge.to] = c;
        if (!queued[edge.to]) {
          queued[edge.to] = true;
          work.push_back(edge.to);
        }
      }
    }
  }
  for (auto& l : label) ref.labels.push_back(*l);
  return ref;
}

}  // namespace tamp

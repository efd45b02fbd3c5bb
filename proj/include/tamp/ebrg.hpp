#pragma once

// Basis partitions, minimal explanations and the extended basis reachability
// graph: a min-cost spanning tree over basis markings.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <queue>
#include <set>
#include <span>
#include <unordered_set>
#include <vector>

#include "tamp/abstraction.hpp"
#include "tamp/error.hpp"
#include "tamp/petri_net.hpp"

namespace tamp {

struct BasisPartition {
  std::vector<bool> is_explicit;  // per transition
  std::vector<TransitionId> explicit_transitions;
  std::vector<TransitionId> implicit_transitions;

  bool has_implicit() const { return !implicit_transitions.empty(); }

  friend bool operator==(const BasisPartition&, const BasisPartition&) = default;
};

// Looks for a directed cycle in the subnet induced by the transitions flagged
// in `implicit`. On success the transitions on the cycle are written to `cycle`.
inline bool find_implicit_cycle(const PetriNet& net, const std::vector<bool>& implicit,
                                std::vector<TransitionId>* cycle = nullptr) {
  // Nodes: places [0, P), transitions [P, P+T).
  const std::size_t np = net.place_count();
  const std::size_t n = np + net.transition_count();
  auto successors = [&](std::size_t v) {
    std::vector<std::size_t> out;
    if (v < np) {
      for (TransitionId t : net.consumers(static_cast<PlaceId>(v)))
        if (implicit[t]) out.push_back(np + t);
    } else {
      auto t = static_cast<TransitionId>(v - np);
      if (implicit[t])
        for (PlaceId p : net.outputs(t)) out.push_back(p);
    }
    return out;
  };
  enum : std::uint8_t { kWhite, kGrey, kBlack };
  std::vector<std::uint8_t> colour(n, kWhite);
  std::vector<std::size_t> parent(n, n);
  for (std::size_t root = 0; root < n; ++root) {
    if (colour[root] != kWhite) continue;
    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> stack;
    colour[root] = kGrey;
    stack.push_back({root, successors(root)});
    while (!stack.empty()) {
      auto& [v, succ] = stack.back();
      if (succ.empty()) {
        colour[v] = kBlack;
        stack.pop_back();
        continue;
      }
      std::size_t w = succ.front();
      succ.erase(succ.begin());
      if (colour[w] == kGrey) {
        if (cycle) {
          cycle->clear();
          for (std::size_t x = v;; x = parent[x]) {
            if (x >= np) cycle->push_back(static_cast<TransitionId>(x - np));
            if (x == w) break;
          }
          std::sort(cycle->begin(), cycle->end());
        }
        return true;
      }
      if (colour[w] == kWhite) {
        colour[w] = kGrey;
        parent[w] = v;
        stack.push_back({w, successors(w)});
      }
    }
  }
  return false;
}

inline BasisPartition make_partition(const PetriNet& net, std::vector<bool> is_explicit) {
  if (is_explicit.size() != net.transition_count()) throw DomainError("partition size mismatch");
  std::vector<bool> implicit(is_explicit.size());
  BasisPartition part;
  for (TransitionId t = 0; t < is_explicit.size(); ++t) {
    implicit[t] = !is_explicit[t];
    (is_explicit[t] ? part.explicit_transitions : part.implicit_transitions).push_back(t);
  }
  if (find_implicit_cycle(net, implicit)) throw DomainError("implicit subnet is not acyclic");
  part.is_explicit = std::move(is_explicit);
  return part;
}

// Transitions that have to stay explicit: those marking an indicating place
// or a place carrying an end label.
inline std::vector<bool> forced_explicit(const PetriNet& net, std::size_t mobility_places) {
  std::vector<bool> forced(net.transition_count(), false);
  for (TransitionId t = 0; t < net.transition_count(); ++t)
    for (PlaceId p : net.outputs(t)) {
      if (p >= mobility_places) forced[t] = true;
      for (const Atom& a : net.labels(p))
        if (a.kind == AtomKind::kEnd) forced[t] = true;
    }
  return forced;
}

// Starts from the forced set, then breaks implicit cycles greedily by
// promoting the smallest transition id on each cycle found; promotions that
// turn out unnecessary are undone afterwards.
inline BasisPartition choose_partition(const PetriNet& net, std::size_t mobility_places) {
  std::vector<bool> is_explicit = forced_explicit(net, mobility_places);
  std::vector<bool> implicit(net.transition_count());
  for (std::size_t t = 0; t < implicit.size(); ++t) implicit[t] = !is_explicit[t];

  std::vector<TransitionId> promoted;
  std::vector<TransitionId> cycle;
  while (find_implicit_cycle(net, implicit, &cycle)) {
    TransitionId t = cycle.front();
    implicit[t] = false;
    is_explicit[t] = true;
    promoted.push_back(t);
  }
  std::sort(promoted.begin(), promoted.end());
  for (TransitionId t : promoted) {
    implicit[t] = true;
    if (find_implicit_cycle(net, implicit)) {
      implicit[t] = false;
    } else {
      is_explicit[t] = false;
    }
  }
  return make_partition(net, std::move(is_explicit));
}

inline BasisPartition choose_partition(const MonitoredNet& qm) { return choose_partition(qm.net, qm.mobility_places); }

struct Explanation {
  FiringVector vector;
  Cost cost = 0;
};

struct ExplanationOptions {
  std::size_t state_cap = 1'000'000;
};

// All Pareto-minimal implicit firing vectors whose firing from `m` enables
// the explicit transition `t`, sorted by vector.
inline std::vector<Explanation> minimal_explanations(const PetriNet& net, const BasisPartition& part, const Marking& m,
                                                     TransitionId t, const ExplanationOptions& opts = {}) {
  net.check_transition(t);
  if (!part.is_explicit.at(t)) throw DomainError("transition " + std::to_string(t) + " is not explicit");
  if (enabled(net, m, t)) return {Explanation{}};
  if (!part.has_implicit()) return {};

  struct Node {
    FiringVector y;
    Marking m;
  };
  std::set<FiringVector> seen{FiringVector{}};
  std::deque<Node> open{{FiringVector{}, m}};
  std::vector<FiringVector> found;
  while (!open.empty()) {
    Node cur = std::move(open.front());
    open.pop_front();
    for (TransitionId u : part.implicit_transitions) {
      if (!enabled(net, cur.m, u)) continue;
      FiringVector y = cur.y;
      y.add(u, 1);
      if (!seen.insert(y).second) continue;
      if (seen.size() > opts.state_cap)
        throw ResourceError(opts.state_cap, "explanation search exceeded " + std::to_string(opts.state_cap) + " vectors");
      Marking next = fire(net, cur.m, u);
      if (enabled(net, next, t)) {
        found.push_back(std::move(y));  // any extension would be dominated
      } else {
        open.push_back({std::move(y), std::move(next)});
      }
    }
  }
  std::vector<Explanation> out;
  for (const auto& y : found) {
    bool minimal = true;
    for (const auto& other : found)
      if (other != y && other.dominated_by(y)) {
        minimal = false;
        break;
      }
    if (minimal) out.push_back({y, vector_cost(net, y)});
  }
  std::sort(out.begin(), out.end(), [](const Explanation& a, const Explanation& b) { return a.vector < b.vector; });
  return out;
}

struct BasisEdge {
  std::uint32_t parent = 0;
  TransitionId transition = 0;
  FiringVector explanation;

  friend bool operator==(const BasisEdge&, const BasisEdge&) = default;
};

// Basis markings in discovery order (index 0 is the initial marking), each
// non-root marking with its unique min-cost parent edge and accumulated cost q.
class BasisGraph {
 public:
  BasisGraph() = default;
  explicit BasisGraph(std::size_t width) : width_(width) {}

  std::size_t width() const { return width_; }
  std::size_t size() const { return costs_.size(); }
  std::size_t edge_count() const { return size() == 0 ? 0 : size() - 1; }
  static constexpr std::uint32_t root() { return 0; }

  std::span<const Count> counts(std::size_t i) const { return {arena_.data() + i * width_, width_}; }
  Marking marking(std::size_t i) const {
    auto c = counts(i);
    return Marking(std::vector<Count>(c.begin(), c.end()));
  }
  const Cost& cost(std::size_t i) const { return costs_[i]; }
  // Undefined for the root.
  const BasisEdge& edge(std::size_t i) const { return edges_[i]; }

  std::uint32_t append(std::span<const Count> m, Cost q, BasisEdge e) {
    arena_.insert(arena_.end(), m.begin(), m.end());
    costs_.push_back(q);
    edges_.push_back(std::move(e));
    return static_cast<std::uint32_t>(costs_.size() - 1);
  }
  void pop_back() {
    arena_.resize(arena_.size() - width_);
    costs_.pop_back();
    edges_.pop_back();
  }
  void relabel(std::size_t i, Cost q, BasisEdge e) {
    costs_[i] = q;
    edges_[i] = std::move(e);
  }

  std::optional<std::size_t> find(const Marking& m) const {
    for (std::size_t i = 0; i < size(); ++i)
      if (std::equal(m.counts().begin(), m.counts().end(), counts(i).begin())) return i;
    return std::nullopt;
  }

  friend bool operator==(const BasisGraph&, const BasisGraph&) = default;

 private:
  std::size_t width_ = 0;
  std::vector<Count> arena_;
  std::vector<Cost> costs_;
  std::vector<BasisEdge> edges_;
};

struct EbrgOptions {
  std::size_t state_cap = 5'000'000;
  ExplanationOptions explanation;
};

// Lowest-q-first expansion (ties by discovery index, then transition id and
// explanation order). Each marking is settled once with its minimal q, so the
// parent-edge replacement rule never leaves stale costs on descendants.
inline BasisGraph build_ebrg(const PetriNet& net, const BasisPartition& part, const EbrgOptions& opts = {}) {
  if (part.is_explicit.size() != net.transition_count()) throw DomainError("partition does not match net");
  const std::size_t width = net.place_count();
  BasisGraph g(width);

  struct RowHash {
    const BasisGraph* g;
    std::size_t operator()(std::uint32_t i) const { return hash_counts(g->counts(i)); }
  };
  struct RowEq {
    const BasisGraph* g;
    bool operator()(std::uint32_t a, std::uint32_t b) const {
      auto x = g->counts(a);
      auto y = g->counts(b);
      return std::equal(x.begin(), x.end(), y.begin());
    }
  };
  std::unordered_set<std::uint32_t, RowHash, RowEq> index(1024, RowHash{&g}, RowEq{&g});

  g.append(net.initial_marking().counts(), Cost(0), BasisEdge{});
  index.insert(0);
  std::vector<bool> settled{false};

  using Item = std::pair<Cost, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  open.push({Cost(0), 0});

  std::vector<Count> scratch(width);
  const bool fast = !part.has_implicit();
  while (!open.empty()) {
    auto [q, idx] = open.top();
    open.pop();
    if (settled[idx] || q != g.cost(idx)) continue;
    settled[idx] = true;
    const Marking here = g.marking(idx);

    for (TransitionId t : part.explicit_transitions) {
      std::vector<Explanation> ys;
      if (fast) {
        bool ok = true;
        for (PlaceId p : net.inputs(t)) ok = ok && here[p] > 0;
        if (!ok) continue;
        ys.emplace_back();
      } else {
        ys = minimal_explanations(net, part, here, t, opts.explanation);
      }
      for (auto& y : ys) {
        std::copy(here.counts().begin(), here.counts().end(), scratch.begin());
        for (const auto& [u, n] : y.vector.entries())
          for (Count k = 0; k < n; ++k) detail::fire_unchecked(net, scratch, u);
        detail::fire_unchecked(net, scratch, t);
        const Cost nq = q + y.cost + net.cost(t);

        std::uint32_t probe = g.append(scratch, nq, BasisEdge{idx, t, y.vector});
        auto [it, inserted] = index.insert(probe);
        if (inserted) {
          settled.push_back(false);
          open.push({nq, probe});
          if (g.size() > opts.state_cap)
            throw ResourceError(opts.state_cap,
                                "basis graph exceeded the state cap of " + std::to_string(opts.state_cap) + " markings");
          continue;
        }
        // Already known: drop the probe row, maybe improve the parent edge.
        g.pop_back();
        const std::uint32_t existing = *it;
        if (!settled[existing] && nq < g.cost(existing)) {
          g.relabel(existing, nq, BasisEdge{idx, t, std::move(y.vector)});
          open.push({nq, existing});
        }
      }
    }
  }
  return g;
}

inline BasisGraph build_ebrg(const MonitoredNet& qm, const BasisPartition& part, const EbrgOptions& opts = {}) {
  return build_ebrg(qm.net, part, opts);
}

}  // namespace tamp

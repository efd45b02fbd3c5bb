#pragma once

// Reduction of a movement net to the places that matter for a task (initially
// occupied and labelled places), and the monitored net that latches visits of
// trajectory propositions into one-token indicating places.

#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tamp/error.hpp"
#include "tamp/petri_net.hpp"

namespace tamp {

// Cheapest single-token walk from `source` to `target` whose intermediate
// places avoid every blocked place.
struct MinimalSequence {
  PlaceId source = 0;
  PlaceId target = 0;
  std::vector<TransitionId> sequence;
  Cost cost = 0;

  friend bool operator==(const MinimalSequence&, const MinimalSequence&) = default;
};

namespace detail {

inline void require_state_machine(const PetriNet& q) {
  for (TransitionId t = 0; t < q.transition_count(); ++t)
    if (q.inputs(t).size() != 1 || q.outputs(t).size() != 1)
      throw DomainError("transition " + std::to_string(t) + " is not a single-token movement");
}

}  // namespace detail

// Ties between equal-cost walks go to the lexicographically smallest sequence
// of transition ids. Returns nullopt when no admissible walk exists.
inline std::optional<MinimalSequence> minimal_sequence(const PetriNet& q, PlaceId source, PlaceId target,
                                                       const std::vector<bool>& blocked) {
  if (source >= q.place_count() || target >= q.place_count()) throw DomainError("place id out of range");
  if (source == target) throw DomainError("minimal sequence needs distinct endpoints");
  if (blocked.size() != q.place_count()) throw DomainError("blocked mask has wrong size");

  // Cost-to-go towards `target`, expanding only through admissible places.
  std::vector<std::optional<Cost>> dist(q.place_count());
  using Item = std::pair<Cost, PlaceId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[target] = Cost(0);
  open.push({Cost(0), target});
  while (!open.empty()) {
    auto [d, v] = open.top();
    open.pop();
    if (d != *dist[v]) continue;
    if (v != target && blocked[v]) continue;
    for (TransitionId t : q.producers(v)) {
      PlaceId u = q.inputs(t)[0];
      if (u == target) continue;
      Cost nd = d + q.cost(t);
      if (!dist[u] || nd < *dist[u]) {
        dist[u] = nd;
        open.push({nd, u});
      }
    }
  }
  if (!dist[source]) return std::nullopt;

  MinimalSequence ms{source, target, {}, *dist[source]};
  PlaceId cur = source;
  while (cur != target) {
    bool advanced = false;
    for (TransitionId t : q.consumers(cur)) {
      PlaceId next = q.outputs(t)[0];
      if (next != target && (blocked[next] || next == source)) continue;
      if (!dist[next] || *dist[cur] != q.cost(t) + *dist[next]) continue;
      ms.sequence.push_back(t);
      cur = next;
      advanced = true;
      break;
    }
    if (!advanced) throw IntegrityError("minimal sequence reconstruction failed");
  }
  return ms;
}

inline std::optional<MinimalSequence> minimal_sequence(const PetriNet& q, PlaceId source, PlaceId target,
                                                       std::span<const PlaceId> blocked) {
  std::vector<bool> mask(q.place_count(), false);
  for (PlaceId p : blocked) mask.at(p) = true;
  return minimal_sequence(q, source, target, mask);
}

// One-step move off a place carrying end labels onto an unlabelled neighbour.
struct ExitMove {
  TransitionId transition = 0;  // in the grid net
  Cost cost = 0;
};

struct SimplifiedNet {
  PetriNet net;
  std::vector<PlaceId> q_place;                 // abstract place -> grid-net place
  std::vector<MinimalSequence> lift_map;        // abstract transition -> walk in the grid net
  std::vector<std::optional<ExitMove>> exits;   // per abstract place

  std::optional<PlaceId> abstract_place(PlaceId grid_place) const {
    auto it = std::lower_bound(q_place.begin(), q_place.end(), grid_place);
    if (it == q_place.end() || *it != grid_place) return std::nullopt;
    return static_cast<PlaceId>(it - q_place.begin());
  }
};

// Places: initially occupied or labelled places, in grid-net order.
// Transitions: one per finite-cost minimal sequence from any such place to any
// other labelled place, ordered by (source, target).
inline SimplifiedNet build_simplified(const PetriNet& q) {
  detail::require_state_machine(q);
  SimplifiedNet s;
  std::vector<bool> labelled(q.place_count(), false);
  std::vector<PlaceId> targets;
  for (PlaceId p = 0; p < q.place_count(); ++p) {
    labelled[p] = !q.labels(p).empty();
    if (labelled[p]) targets.push_back(p);
    if (labelled[p] || q.initial_marking()[p] > 0) s.q_place.push_back(p);
  }

  PetriNetBuilder b;
  for (PlaceId p : s.q_place) {
    PlaceId id = b.add_place(q.labels(p));
    b.set_initial(id, q.initial_marking()[p]);
  }
  for (PlaceId si = 0; si < s.q_place.size(); ++si) {
    const PlaceId from = s.q_place[si];
    for (PlaceId to : targets) {
      if (to == from) continue;
      std::vector<bool> blocked = labelled;
      blocked[from] = false;
      blocked[to] = false;
      auto ms = minimal_sequence(q, from, to, blocked);
      if (!ms) continue;
      b.add_transition({si}, {*s.abstract_place(to)}, ms->cost);
      s.lift_map.push_back(std::move(*ms));
    }
  }
  s.net = std::move(b).build();

  s.exits.resize(s.q_place.size());
  for (PlaceId si = 0; si < s.q_place.size(); ++si) {
    const PlaceId p = s.q_place[si];
    bool has_end = false;
    for (const Atom& a : q.labels(p)) has_end |= a.kind == AtomKind::kEnd;
    if (!has_end) continue;
    for (TransitionId t : q.consumers(p)) {
      if (!q.labels(q.outputs(t)[0]).empty()) continue;
      if (!s.exits[si] || q.cost(t) < s.exits[si]->cost) s.exits[si] = ExitMove{t, q.cost(t)};
    }
  }
  return s;
}

inline std::vector<TransitionId> lift(const SimplifiedNet& s, std::span<const TransitionId> abstract_run) {
  std::vector<TransitionId> out;
  for (TransitionId t : abstract_run) {
    if (t >= s.lift_map.size()) throw DomainError("unknown abstract transition " + std::to_string(t));
    const auto& seq = s.lift_map[t].sequence;
    out.insert(out.end(), seq.begin(), seq.end());
  }
  return out;
}

// Grid-net marking corresponding to the mobility part of an abstract marking.
inline Marking lift_marking(const SimplifiedNet& s, const Marking& m, std::size_t grid_places) {
  Marking out(grid_places);
  for (PlaceId i = 0; i < s.q_place.size(); ++i) out[s.q_place[i]] = m[i];
  return out;
}

struct MonitoredNet {
  PetriNet net;
  std::map<std::string, PlaceId> indicator_of;
  std::size_t mobility_places = 0;  // places [0, mobility_places) mirror the simplified net

  std::size_t indicator_count() const { return indicator_of.size(); }
};

inline std::set<std::string> trajectory_propositions(const PetriNet& net) {
  std::set<std::string> out;
  for (PlaceId p = 0; p < net.place_count(); ++p)
    for (const Atom& a : net.labels(p))
      if (a.kind == AtomKind::kVisit) out.insert(a.name);
  return out;
}

// Adds one indicating place (capacity 1, no labels) per trajectory
// proposition, in name order. A transition entering a place labelled with
// visit(x) also produces into x's indicator. Indicators of propositions held
// by initially occupied places start marked.
inline MonitoredNet build_monitored(const SimplifiedNet& s, const std::set<std::string>& trajectory_props) {
  const PetriNet& sn = s.net;
  MonitoredNet m;
  m.mobility_places = sn.place_count();
  PetriNetBuilder b;
  for (PlaceId p = 0; p < sn.place_count(); ++p) {
    b.add_place(sn.labels(p));
    b.set_initial(p, sn.initial_marking()[p]);
  }
  for (const std::string& name : trajectory_props) m.indicator_of[name] = b.add_place({}, Count{1});

  auto indicators_of = [&](PlaceId p) {
    std::vector<PlaceId> out;
    for (const Atom& a : sn.labels(p))
      if (a.kind == AtomKind::kVisit)
        if (auto it = m.indicator_of.find(a.name); it != m.indicator_of.end()) out.push_back(it->second);
    return out;
  };

  for (TransitionId t = 0; t < sn.transition_count(); ++t) {
    std::vector<PlaceId> in(sn.inputs(t).begin(), sn.inputs(t).end());
    std::vector<PlaceId> out(sn.outputs(t).begin(), sn.outputs(t).end());
    for (PlaceId p : sn.outputs(t))
      for (PlaceId ind : indicators_of(p))
        if (std::find(out.begin(), out.end(), ind) == out.end()) out.push_back(ind);
    b.add_transition(std::move(in), std::move(out), sn.cost(t));
  }
  for (PlaceId p = 0; p < sn.place_count(); ++p)
    if (sn.initial_marking()[p] > 0)
      for (PlaceId ind : indicators_of(p)) b.set_initial(ind, 1);
  m.net = std::move(b).build();
  return m;
}

inline MonitoredNet build_monitored(const SimplifiedNet& s) {
  return build_monitored(s, trajectory_propositions(s.net));
}

}  // namespace tamp

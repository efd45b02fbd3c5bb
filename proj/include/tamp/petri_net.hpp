#pragma once

// Place/transition nets with 0/1 arcs, exact costs and proposition labels.
// A place may carry a saturation capacity: tokens produced beyond it are
// dropped, which is how one-shot indicator places are modelled.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tamp/cost.hpp"
#include "tamp/error.hpp"

namespace tamp {

using PlaceId = std::uint32_t;
using TransitionId = std::uint32_t;
using Count = std::uint32_t;

// kVisit atoms hold along a trajectory, kEnd atoms concern the final state.
enum class AtomKind : std::uint8_t { kVisit = 0, kEnd = 1 };

struct Atom {
  AtomKind kind = AtomKind::kVisit;
  std::string name;

  friend auto operator<=>(const Atom&, const Atom&) = default;
  friend bool operator==(const Atom&, const Atom&) = default;
};

inline std::string to_string(const Atom& a) {
  return (a.kind == AtomKind::kVisit ? "visit(" : "end(") + a.name + ")";
}

// Sorted, duplicate-free.
using LabelSet = std::vector<Atom>;

inline void normalize(LabelSet& labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
}

inline bool contains(const LabelSet& labels, const Atom& a) {
  return std::binary_search(labels.begin(), labels.end(), a);
}

class Marking {
 public:
  Marking() = default;
  explicit Marking(std::size_t places) : counts_(places, 0) {}
  explicit Marking(std::vector<Count> counts) : counts_(std::move(counts)) {}

  std::size_t size() const { return counts_.size(); }
  Count operator[](PlaceId p) const { return counts_[p]; }
  Count& operator[](PlaceId p) { return counts_[p]; }
  std::span<const Count> counts() const { return counts_; }

  Count total() const {
    Count n = 0;
    for (Count c : counts_) n += c;
    return n;
  }

  std::vector<PlaceId> occupied() const {
    std::vector<PlaceId> out;
    for (PlaceId p = 0; p < counts_.size(); ++p)
      if (counts_[p] > 0) out.push_back(p);
    return out;
  }

  friend bool operator==(const Marking&, const Marking&) = default;
  friend auto operator<=>(const Marking&, const Marking&) = default;

 private:
  std::vector<Count> counts_;
};

inline std::size_t hash_counts(std::span<const Count> counts) {
  // FNV-1a over the count words.
  std::uint64_t h = 1469598103934665603ull;
  for (Count c : counts) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h ^ (h >> 29));
}

struct MarkingHash {
  std::size_t operator()(const Marking& m) const { return hash_counts(m.counts()); }
};

// Sparse occurrence count per transition, kept sorted by transition id.
class FiringVector {
 public:
  using Entry = std::pair<TransitionId, Count>;

  FiringVector() = default;
  explicit FiringVector(std::vector<Entry> entries) : entries_(std::move(entries)) { canonicalize(); }

  static FiringVector of(std::span<const TransitionId> sequence) {
    FiringVector y;
    for (TransitionId t : sequence) y.add(t, 1);
    return y;
  }

  void add(TransitionId t, Count n) {
    if (n == 0) return;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), t,
                               [](const Entry& e, TransitionId id) { return e.first < id; });
    if (it != entries_.end() && it->first == t)
      it->second += n;
    else
      entries_.insert(it, {t, n});
  }

  Count count(TransitionId t) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), t,
                               [](const Entry& e, TransitionId id) { return e.first < id; });
    return (it != entries_.end() && it->first == t) ? it->second : 0;
  }

  std::span<const Entry> entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }
  Count total() const {
    Count n = 0;
    for (const auto& e : entries_) n += e.second;
    return n;
  }

  // Componentwise <=.
  bool dominated_by(const FiringVector& other) const {
    for (const auto& [t, n] : entries_)
      if (other.count(t) < n) return false;
    return true;
  }

  friend bool operator==(const FiringVector&, const FiringVector&) = default;
  friend auto operator<=>(const FiringVector&, const FiringVector&) = default;

 private:
  void canonicalize() {
    std::sort(entries_.begin(), entries_.end());
    std::vector<Entry> merged;
    for (const auto& e : entries_) {
      if (e.second == 0) continue;
      if (!merged.empty() && merged.back().first == e.first)
        merged.back().second += e.second;
      else
        merged.push_back(e);
    }
    entries_ = std::move(merged);
  }

  std::vector<Entry> entries_;
};

class PetriNetBuilder;

class PetriNet {
 public:
  std::size_t place_count() const { return labels_.size(); }
  std::size_t transition_count() const { return costs_.size(); }

  std::span<const PlaceId> inputs(TransitionId t) const { return inputs_.at(t); }
  std::span<const PlaceId> outputs(TransitionId t) const { return outputs_.at(t); }
  const Cost& cost(TransitionId t) const { return costs_.at(t); }
  std::span<const Cost> costs() const { return costs_; }
  const LabelSet& labels(PlaceId p) const { return labels_.at(p); }
  std::optional<Count> capacity(PlaceId p) const { return capacity_.at(p); }
  const Marking& initial_marking() const { return initial_; }

  // Transitions consuming from / producing into p, ascending.
  std::span<const TransitionId> consumers(PlaceId p) const { return consumers_.at(p); }
  std::span<const TransitionId> producers(PlaceId p) const { return producers_.at(p); }

  int pre(PlaceId p, TransitionId t) const { return has(inputs_.at(t), p) ? 1 : 0; }
  int post(PlaceId p, TransitionId t) const { return has(outputs_.at(t), p) ? 1 : 0; }
  int incidence(PlaceId p, TransitionId t) const { return post(p, t) - pre(p, t); }

  // Dense place-by-transition C = Post - Pre.
  std::vector<std::vector<int>> incidence_matrix() const {
    std::vector<std::vector<int>> c(place_count(), std::vector<int>(transition_count(), 0));
    for (TransitionId t = 0; t < transition_count(); ++t) {
      for (PlaceId p : inputs_[t]) c[p][t] -= 1;
      for (PlaceId p : outputs_[t]) c[p][t] += 1;
    }
    return c;
  }

  void check_transition(TransitionId t) const {
    if (t >= transition_count())
      throw DomainError("unknown transition id " + std::to_string(t) + " (net has " +
                        std::to_string(transition_count()) + ")");
  }

 private:
  friend class PetriNetBuilder;

  static bool has(const std::vector<PlaceId>& v, PlaceId p) { return std::binary_search(v.begin(), v.end(), p); }

  std::vector<std::vector<PlaceId>> inputs_;
  std::vector<std::vector<PlaceId>> outputs_;
  std::vector<Cost> costs_;
  std::vector<LabelSet> labels_;
  std::vector<std::optional<Count>> capacity_;
  std::vector<std::vector<TransitionId>> consumers_;
  std::vector<std::vector<TransitionId>> producers_;
  Marking initial_;
};

class PetriNetBuilder {
 public:
  PlaceId add_place(LabelSet labels = {}, std::optional<Count> capacity = std::nullopt) {
    normalize(labels);
    net_.labels_.push_back(std::move(labels));
    net_.capacity_.push_back(capacity);
    initial_.push_back(0);
    return static_cast<PlaceId>(net_.labels_.size() - 1);
  }

  TransitionId add_transition(std::vector<PlaceId> inputs, std::vector<PlaceId> outputs, Cost cost) {
    auto id = static_cast<TransitionId>(net_.costs_.size());
    std::sort(inputs.begin(), inputs.end());
    std::sort(outputs.begin(), outputs.end());
    net_.inputs_.push_back(std::move(inputs));
    net_.outputs_.push_back(std::move(outputs));
    net_.costs_.push_back(cost);
    return id;
  }

  void set_initial(PlaceId p, Count n) { initial_.at(p) = n; }

  PetriNet build() && {
    const std::size_t np = net_.labels_.size();
    net_.consumers_.assign(np, {});
    net_.producers_.assign(np, {});
    for (TransitionId t = 0; t < net_.costs_.size(); ++t) {
      const std::string where = "transition " + std::to_string(t);
      if (net_.inputs_[t].empty() || net_.outputs_[t].empty())
        throw ValidationError(where, "needs at least one input and one output place");
      if (net_.costs_[t] <= 0) throw ValidationError(where, "cost must be positive");
      for (const auto* arcs : {&net_.inputs_[t], &net_.outputs_[t]}) {
        if (std::adjacent_find(arcs->begin(), arcs->end()) != arcs->end())
          throw ValidationError(where, "arc weights must be 0 or 1");
        for (PlaceId p : *arcs)
          if (p >= np) throw ValidationError(where, "arc to unknown place " + std::to_string(p));
      }
      for (PlaceId p : net_.inputs_[t]) net_.consumers_[p].push_back(t);
      for (PlaceId p : net_.outputs_[t]) net_.producers_[p].push_back(t);
    }
    for (PlaceId p = 0; p < np; ++p)
      if (net_.capacity_[p] && initial_[p] > *net_.capacity_[p])
        throw ValidationError("place " + std::to_string(p), "initial tokens exceed capacity");
    net_.initial_ = Marking(std::move(initial_));
    return std::move(net_);
  }

 private:
  PetriNet net_;
  std::vector<Count> initial_;
};

inline bool enabled(const PetriNet& net, const Marking& m, TransitionId t) {
  net.check_transition(t);
  for (PlaceId p : net.inputs(t))
    if (m[p] < 1) return false;
  return true;
}

namespace detail {

// Firing on raw counts; the caller has checked enabling.
inline void fire_unchecked(const PetriNet& net, std::span<Count> m, TransitionId t) {
  for (PlaceId p : net.inputs(t)) m[p] -= 1;
  for (PlaceId p : net.outputs(t)) {
    m[p] += 1;
    if (auto cap = net.capacity(p); cap && m[p] > *cap) m[p] = *cap;
  }
}

inline void fire_checked(const PetriNet& net, Marking& m, TransitionId t, std::size_t step) {
  net.check_transition(t);
  for (PlaceId p : net.inputs(t)) {
    if (m[p] < 1)
      throw FiringError(t, p, step,
                        "transition " + std::to_string(t) + " not enabled at step " + std::to_string(step) +
                            ": place " + std::to_string(p) + " is empty");
  }
  std::vector<Count> counts(m.counts().begin(), m.counts().end());
  fire_unchecked(net, counts, t);
  m = Marking(std::move(counts));
}

}  // namespace detail

inline Marking fire(const PetriNet& net, const Marking& m, TransitionId t) {
  Marking out = m;
  detail::fire_checked(net, out, t, 0);
  return out;
}

// Union of the labels of every place holding a token.
inline LabelSet occupied_labels(const PetriNet& net, const Marking& m) {
  LabelSet out;
  for (PlaceId p = 0; p < m.size(); ++p)
    if (m[p] > 0) out.insert(out.end(), net.labels(p).begin(), net.labels(p).end());
  normalize(out);
  return out;
}

// Labels seen along a run: what is occupied at the start, then h(t•) per step.
struct PropositionWord {
  LabelSet initial;
  std::vector<LabelSet> steps;
};

struct ReplayTrace {
  Marking final_marking;
  std::vector<Marking> markings;  // markings[0] is the start
  PropositionWord word;
};

inline ReplayTrace replay(const PetriNet& net, const Marking& m, std::span<const TransitionId> sigma) {
  ReplayTrace trace;
  trace.markings.reserve(sigma.size() + 1);
  trace.markings.push_back(m);
  trace.word.initial = occupied_labels(net, m);
  Marking cur = m;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    detail::fire_checked(net, cur, sigma[i], i);
    LabelSet letter;
    for (PlaceId p : net.outputs(sigma[i])) letter.insert(letter.end(), net.labels(p).begin(), net.labels(p).end());
    normalize(letter);
    trace.word.steps.push_back(std::move(letter));
    trace.markings.push_back(cur);
  }
  trace.final_marking = std::move(cur);
  return trace;
}

inline Cost sequence_cost(const PetriNet& net, std::span<const TransitionId> sigma) {
  Cost total = 0;
  for (TransitionId t : sigma) {
    net.check_transition(t);
    total += net.cost(t);
  }
  return total;
}

inline Cost vector_cost(const PetriNet& net, const FiringVector& y) {
  Cost total = 0;
  for (const auto& [t, n] : y.entries()) total += net.cost(t) * static_cast<std::int64_t>(n);
  return total;
}

}  // namespace tamp

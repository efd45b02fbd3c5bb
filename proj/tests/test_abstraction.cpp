#include <gtest/gtest.h>

#include <functional>
#include <map>
#include <random>

#include "support.hpp"

using namespace tamp;

namespace {

std::vector<PlaceId> places_along(const PetriNet& q, PlaceId start, const std::vector<TransitionId>& seq) {
  std::vector<PlaceId> out{start};
  for (TransitionId t : seq) out.push_back(q.outputs(t)[0]);
  return out;
}

}  // namespace

TEST(Abstraction, Example1MinimalSequences) {
  const GridNet g = env_to_pn(test::example1());
  const std::vector<PlaceId> labelled{2, 6, 8};
  auto blocked_for = [&](PlaceId a, PlaceId b) {
    std::vector<bool> m(g.net.place_count(), false);
    for (PlaceId p : labelled) m[p] = p != a && p != b;
    return m;
  };
  auto ms = minimal_sequence(g.net, 0, 6, blocked_for(0, 6));
  ASSERT_TRUE(ms);
  EXPECT_EQ(ms->cost, Cost(2));
  EXPECT_EQ(places_along(g.net, 0, ms->sequence), (std::vector<PlaceId>{0, 3, 6}));
  auto one = minimal_sequence(g.net, 7, 8, blocked_for(7, 8));
  ASSERT_TRUE(one);
  EXPECT_EQ(one->cost, Cost(1));
  EXPECT_EQ(one->sequence.size(), 1u);
  EXPECT_THROW(minimal_sequence(g.net, 3, 3, blocked_for(3, 3)), DomainError);
}

TEST(Abstraction, DisconnectedIsAbsent) {
  Environment env;
  env.rows = 1;
  env.cols = 3;
  env.obstacles = {{0, 1}};
  env.agents = {{0, 0}};
  env.regions = {{"r", {{0, 2}}, {"a"}, {}}};
  const GridNet g = env_to_pn(env);
  EXPECT_FALSE(minimal_sequence(g.net, 0, 1, std::vector<bool>(2, false)));
  const SimplifiedNet s = build_simplified(g.net);
  EXPECT_EQ(s.net.place_count(), 2u);
  EXPECT_EQ(s.net.transition_count(), 0u);
}

TEST(Abstraction, Example1Simplified) {
  const GridNet g = env_to_pn(test::example1());
  const SimplifiedNet s = build_simplified(g.net);
  EXPECT_EQ(s.q_place, (std::vector<PlaceId>{0, 2, 6, 7, 8}));
  ASSERT_EQ(s.net.transition_count(), 12u);
  std::map<PlaceId, int> per_source;
  for (TransitionId t = 0; t < s.net.transition_count(); ++t) {
    ++per_source[s.net.inputs(t)[0]];
    EXPECT_EQ(s.net.cost(t), s.lift_map[t].cost);
    EXPECT_EQ(s.net.cost(t), sequence_cost(g.net, s.lift_map[t].sequence));
  }
  // Sources p1, p3, p7, p8, p9 reach 3, 2, 2, 3, 2 labelled targets.
  EXPECT_EQ(per_source[0], 3);
  EXPECT_EQ(per_source[1], 2);
  EXPECT_EQ(per_source[2], 2);
  EXPECT_EQ(per_source[3], 3);
  EXPECT_EQ(per_source[4], 2);
  EXPECT_EQ(s.net.initial_marking(), Marking(std::vector<Count>{1, 0, 0, 1, 0}));
}

TEST(Abstraction, NoLabelsMeansNoTransitions) {
  Environment env;
  env.rows = env.cols = 3;
  env.agents = {{1, 1}};
  const SimplifiedNet s = build_simplified(env_to_pn(env).net);
  EXPECT_EQ(s.net.place_count(), 1u);
  EXPECT_EQ(s.net.transition_count(), 0u);
  const MonitoredNet m = build_monitored(s);
  EXPECT_EQ(m.indicator_count(), 0u);
  EXPECT_EQ(m.net.place_count(), 1u);
}

TEST(Abstraction, LiftConcatenates) {
  const GridNet g = env_to_pn(test::example1());
  const SimplifiedNet s = build_simplified(g.net);
  EXPECT_TRUE(lift(s, {}).empty());
  // Abstract p1 -> p7 lifts to p1 -> p4 -> p7.
  TransitionId t17 = 0;
  for (TransitionId t = 0; t < s.net.transition_count(); ++t)
    if (s.lift_map[t].source == 0 && s.lift_map[t].target == 6) t17 = t;
  const std::vector<TransitionId> one{t17};
  EXPECT_EQ(places_along(g.net, 0, lift(s, one)), (std::vector<PlaceId>{0, 3, 6}));
  EXPECT_THROW(lift(s, std::vector<TransitionId>{99}), DomainError);
}

TEST(Abstraction, Example1Monitored) {
  const GridNet g = env_to_pn(test::example1());
  const SimplifiedNet s = build_simplified(g.net);
  const MonitoredNet m = build_monitored(s);
  EXPECT_EQ(m.net.place_count(), 7u);
  EXPECT_EQ(m.indicator_count(), 2u);
  EXPECT_EQ(m.mobility_places, 5u);
  EXPECT_EQ(m.net.transition_count(), s.net.transition_count());
  for (TransitionId t = 0; t < m.net.transition_count(); ++t) EXPECT_EQ(m.net.cost(t), s.net.cost(t));
  const PlaceId i1 = m.indicator_of.at("1"), i2 = m.indicator_of.at("2");
  EXPECT_TRUE(m.net.labels(i1).empty());
  // Firing into p3 latches both indicators.
  for (TransitionId t = 0; t < m.net.transition_count(); ++t) {
    if (s.lift_map[t].target != 2 || s.lift_map[t].source != 0) continue;
    const Marking after = fire(m.net, m.net.initial_marking(), t);
    EXPECT_EQ(after[i1], 1u);
    EXPECT_EQ(after[i2], 1u);
  }
}

TEST(Abstraction, StartingInsideRegionCountsAsVisit) {
  Environment env;
  env.rows = 1;
  env.cols = 3;
  env.agents = {{0, 0}};
  env.regions = {{"a", {{0, 0}}, {"x"}, {}}, {"b", {{0, 2}}, {"y"}, {}}};
  const MonitoredNet m = build_monitored(build_simplified(env_to_pn(env).net));
  EXPECT_EQ(m.net.initial_marking()[m.indicator_of.at("x")], 1u);
  EXPECT_EQ(m.net.initial_marking()[m.indicator_of.at("y")], 0u);
}

// Every stored minimal sequence against exhaustive enumeration of admissible
// simple walks (optimal walks are simple since costs are positive), including
// the lexicographic tie-break.
TEST(AbstractionProperty, MinimalityAgainstEnumeration) {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int rows = 2 + trial % 4, cols = 2 + (trial / 4) % 4;
    Environment env = test::random_env(rng, rows, cols, 1 + trial % 2, 2 + trial % 3, 0.15);
    if (trial % 3 == 0) env.direction_costs = std::array<Cost, 4>{Cost(1), Cost(2), Cost(1, 2), Cost(3, 2)};
    const GridNet g = env_to_pn(env);
    const PetriNet& q = g.net;
    const SimplifiedNet s = build_simplified(q);
    std::vector<bool> labelled(q.place_count());
    for (PlaceId p = 0; p < q.place_count(); ++p) labelled[p] = !q.labels(p).empty();

    for (PlaceId src : s.q_place) {
      std::map<PlaceId, std::pair<Cost, std::vector<TransitionId>>> best;
      std::vector<bool> on_path(q.place_count(), false);
      std::vector<TransitionId> seq;
      std::function<void(PlaceId, Cost)> dfs = [&](PlaceId v, Cost c) {
        on_path[v] = true;
        for (TransitionId t : q.consumers(v)) {
          PlaceId w = q.outputs(t)[0];
          if (on_path[w]) continue;
          seq.push_back(t);
          if (labelled[w]) {
            auto it = best.find(w);
            if (it == best.end() || c + q.cost(t) < it->second.first ||
                (c + q.cost(t) == it->second.first && seq < it->second.second))
              best[w] = {c + q.cost(t), seq};
          } else {
            dfs(w, c + q.cost(t));
          }
          seq.pop_back();
        }
        on_path[v] = false;
      };
      dfs(src, 0);
      const PlaceId a = *s.abstract_place(src);
      std::map<PlaceId, const MinimalSequence*> stored;
      for (TransitionId t : s.net.consumers(a)) stored[s.lift_map[t].target] = &s.lift_map[t];
      ASSERT_EQ(stored.size(), best.size());
      for (const auto& [target, bc] : best) {
        ASSERT_TRUE(stored.count(target));
        EXPECT_EQ(stored[target]->cost, bc.first);
        EXPECT_EQ(stored[target]->sequence, bc.second);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(AbstractionProperty, CostPreservationAndIndicatorMonotonicity) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    const Environment env = test::random_env(rng, 4, 5, 2, 3, 0.1);
    const GridNet g = env_to_pn(env);
    const SimplifiedNet s = build_simplified(g.net);
    const MonitoredNet m = build_monitored(s);
    Marking ms = m.net.initial_marking();
    std::vector<TransitionId> run;
    for (int step = 0; step < 8; ++step) {
      std::vector<TransitionId> en;
      for (TransitionId t = 0; t < m.net.transition_count(); ++t)
        if (enabled(m.net, ms, t)) en.push_back(t);
      if (en.empty()) break;
      TransitionId t = en[std::uniform_int_distribution<std::size_t>(0, en.size() - 1)(rng)];
      Marking next = fire(m.net, ms, t);
      for (PlaceId p = static_cast<PlaceId>(m.mobility_places); p < m.net.place_count(); ++p) {
        EXPECT_LE(ms[p], next[p]);
        EXPECT_LE(next[p], 1u);
      }
      ms = next;
      run.push_back(t);
    }
    const auto lifted = lift(s, run);
    // Replayable in the grid net and cost preserving across all three nets.
    const ReplayTrace tr = replay(g.net, g.net.initial_marking(), lifted);
    EXPECT_EQ(sequence_cost(m.net, run), sequence_cost(s.net, run));
    EXPECT_EQ(sequence_cost(s.net, run), sequence_cost(g.net, lifted));
    Marking mob(s.net.place_count());
    for (PlaceId p = 0; p < s.net.place_count(); ++p) mob[p] = ms[p];
    EXPECT_EQ(tr.final_marking, lift_marking(s, mob, g.net.place_count()));
  }
}

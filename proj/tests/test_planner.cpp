#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace tamp;

namespace {

const OfflineModel& example1_model() {
  static const OfflineModel m = build_offline(test::example1());
  return m;
}

}  // namespace

TEST(Planner, Example1Target) {
  const OfflineModel& m = example1_model();
  const SpecVectors v =
      compile_vectors(parse_spec("visit(2) & end(3) & !visit(1)"), m.monitored.net, m.monitored.indicator_of);
  const auto sel = select_target(m.graph, v);
  ASSERT_TRUE(sel);
  EXPECT_EQ(sel->cost, Cost(3));
  const Marking tg = m.graph.marking(sel->marking_index);
  EXPECT_EQ(tg[*m.simplified.abstract_place(8)], 1u);
  EXPECT_EQ(tg[m.monitored.indicator_of.at("2")], 1u);
  EXPECT_EQ(tg[m.monitored.indicator_of.at("1")], 0u);
  const auto run = backtrack(m.graph, sel->marking_index, m.monitored.net, m.partition);
  EXPECT_EQ(sequence_cost(m.monitored.net, run), Cost(3));
  EXPECT_TRUE(backtrack(m.graph, 0, m.monitored.net, m.partition).empty());
}

TEST(Planner, EmptySpecSelectsRoot) {
  const OfflineModel& m = example1_model();
  const auto sel = select_target(m.graph, compile_vectors({}, m.monitored.net, m.monitored.indicator_of));
  ASSERT_TRUE(sel);
  EXPECT_EQ(sel->marking_index, 0u);
  EXPECT_EQ(sel->cost, Cost(0));
  const PlanResult r = plan(m, BooleanSpec{});
  ASSERT_TRUE(r.feasible());
  EXPECT_EQ(r.plan->total_cost, Cost(0));
  EXPECT_EQ(r.plan->per_agent_paths, (std::vector<std::vector<Cell>>{{{0, 0}}, {{2, 1}}}));
}

TEST(Planner, DimensionMismatch) {
  const OfflineModel& m = example1_model();
  SpecVectors v;
  v.g.assign(3, 0);
  EXPECT_THROW(select_target(m.graph, v), DomainError);
}

TEST(Planner, Example1Plan) {
  const PlanResult r = plan(example1_model(), parse_spec("visit(2) & end(3) & !visit(1)"));
  ASSERT_TRUE(r.feasible());
  const Plan& p = *r.plan;
  EXPECT_EQ(p.total_cost, Cost(3));
  for (const auto& path : p.per_agent_paths)
    for (Cell c : path) EXPECT_FALSE(c == (Cell{0, 2}));
  bool ends_p9 = false;
  for (const auto& path : p.per_agent_paths) ends_p9 = ends_p9 || path.back() == Cell{2, 2};
  EXPECT_TRUE(ends_p9);
  EXPECT_EQ(p.satisfied_atoms, (LabelSet{{AtomKind::kVisit, "2"}, {AtomKind::kEnd, "3"}}));
  EXPECT_EQ(r.abstract_run.size(), 2u);
}

TEST(Planner, InfeasibleFamilies) {
  const OfflineModel& m = example1_model();
  EXPECT_TRUE(plan(m, parse_spec("end(3) & !visit(2)")).feasible());
  // Region L1 carries both 1 and 2, so visiting 1 always visits 2.
  const PlanResult r = plan(m, parse_spec("visit(1) & !visit(2)"));
  ASSERT_FALSE(r.feasible());
  EXPECT_EQ(r.infeasibility->family, ConstraintFamily::kCombined);
  EXPECT_THROW(parse_spec("end(3) & !end(3)"), ShapeError);
}

TEST(Planner, WalledOffRegionIsInfeasible) {
  Environment env;
  env.rows = 1;
  env.cols = 3;
  env.obstacles = {{0, 1}};
  env.agents = {{0, 0}};
  env.regions = {{"r", {{0, 2}}, {"a"}, {"b"}}};
  const OfflineModel m = build_offline(env);
  PlanResult r = plan(m, parse_spec("visit(a)"));
  ASSERT_FALSE(r.feasible());
  EXPECT_EQ(r.infeasibility->family, ConstraintFamily::kTrajectory);
  r = plan(m, parse_spec("end(b)"));
  ASSERT_FALSE(r.feasible());
  EXPECT_EQ(r.infeasibility->family, ConstraintFamily::kFinal);
}

TEST(Planner, ForbiddenStartRegionIsInfeasible) {
  Environment env;
  env.rows = 1;
  env.cols = 3;
  env.agents = {{0, 0}};
  env.regions = {{"r", {{0, 0}}, {"a"}, {}}, {"s", {{0, 2}}, {"b"}, {}}};
  const PlanResult r = plan(build_offline(env), parse_spec("visit(b) & !visit(a)"));
  ASSERT_FALSE(r.feasible());
  EXPECT_EQ(r.infeasibility->family, ConstraintFamily::kForbidden);
}

// Leaving a forbidden end region costs one step onto an unlabelled neighbour.
TEST(Planner, ForbiddenEndOnStartUsesExitMove) {
  Environment env;
  env.rows = 1;
  env.cols = 3;
  env.agents = {{0, 0}};
  env.regions = {{"r", {{0, 0}}, {}, {"x"}}};
  const OfflineModel m = build_offline(env);
  const PlanResult r = plan(m, parse_spec("!end(x)"));
  ASSERT_TRUE(r.feasible());
  EXPECT_EQ(r.plan->total_cost, Cost(1));
  EXPECT_EQ(r.exit_moves.size(), 1u);
  EXPECT_EQ(r.plan->per_agent_paths[0], (std::vector<Cell>{{0, 0}, {0, 1}}));
  EXPECT_EQ(joint_search(env, parse_spec("!end(x)")).cost, Cost(1));
  PlannerOptions strict;
  strict.exit_moves = false;
  EXPECT_FALSE(plan(m, parse_spec("!end(x)"), strict).feasible());
}

TEST(Planner, LinearizeOrdersCausally) {
  PetriNetBuilder b;
  for (int i = 0; i < 4; ++i) b.add_place();
  b.add_transition({1}, {2}, 1);  // t0 needs the token t1 brings
  b.add_transition({0}, {1}, 1);  // t1
  b.add_transition({2}, {3}, 1);  // t2 explicit
  b.set_initial(0, 1);
  const PetriNet net = std::move(b).build();
  const BasisPartition part = make_partition(net, {false, false, true});
  const auto seq = linearize_explanation(net, part, net.initial_marking(), FiringVector::of(std::vector<TransitionId>{0, 1}));
  EXPECT_EQ(seq, (std::vector<TransitionId>{1, 0}));
  EXPECT_TRUE(linearize_explanation(net, part, net.initial_marking(), {}).empty());
  EXPECT_THROW(linearize_explanation(net, part, net.initial_marking(), FiringVector::of(std::vector<TransitionId>{0})),
               IntegrityError);
  EXPECT_THROW(linearize_explanation(net, part, net.initial_marking(), FiringVector::of(std::vector<TransitionId>{2})),
               IntegrityError);
}

TEST(Planner, DecomposeAgents) {
  const GridNet g = env_to_pn(test::example1());
  EXPECT_EQ(decompose_agents(g.net, {}, g.agent_places), (std::vector<std::vector<PlaceId>>{{0}, {7}}));
  // Two agents on one cell: the lower index moves.
  const std::vector<PlaceId> starts{4, 4};
  const std::vector<TransitionId> one{*g.move(4, 5)};
  EXPECT_EQ(decompose_agents(g.net, one, starts), (std::vector<std::vector<PlaceId>>{{4, 5}, {4}}));
  const std::vector<TransitionId> bad{*g.move(1, 2)};
  EXPECT_THROW(decompose_agents(g.net, bad, starts), IntegrityError);
}

// Scan equals a brute-force evaluation of the constraint system over all
// basis markings, and every returned plan holds and costs what was promised.
TEST(PlannerProperty, ScanMatchesBruteForceAndPlansHold) {
  std::mt19937_64 rng(13);
  BenchConfig cfg;
  cfg.min_labels = 2;
  cfg.max_labels = 4;
  for (int trial = 0; trial < 60; ++trial) {
    const BenchPoint pt{3 + trial % 3, 1 + trial % 3, std::nullopt};
    const Instance inst = random_instance(cfg, pt, static_cast<std::uint64_t>(trial));
    const OfflineModel m = build_offline(inst.env);
    const SpecVectors v = compile_vectors(inst.spec, m.monitored.net, m.monitored.indicator_of);
    std::optional<std::pair<Cost, std::size_t>> brute;
    for (std::size_t i = 0; i < m.graph.size(); ++i) {
      const Marking mk = m.graph.marking(i);
      bool ok = dot(v.g, mk.counts()) <= 0;
      for (const auto& z : v.z) ok = ok && dot(z, mk.counts()) >= 1;
      for (const auto& d : v.d) ok = ok && dot(d, mk.counts()) >= 1;
      if (ok && (!brute || m.graph.cost(i) < brute->first)) brute = {m.graph.cost(i), i};
    }
    const auto sel = select_target(m.graph, v);
    ASSERT_EQ(sel.has_value(), brute.has_value());
    if (sel) {
      EXPECT_EQ(sel->cost, brute->first);
      EXPECT_EQ(sel->marking_index, brute->second);
    }
    PlannerOptions opts;
    const PlanResult r = plan(m, inst.spec, opts);
    if (!r.feasible()) continue;
    const PetriNet& q = m.grid.net;
    const ReplayTrace tr = replay(q, q.initial_marking(), r.plan->team_sequence);
    EXPECT_TRUE(holds(inst.spec, tr.word, tr.final_marking, q));
    EXPECT_EQ(sequence_cost(m.monitored.net, r.abstract_run), sequence_cost(m.simplified.net, r.abstract_run));
    EXPECT_EQ(sequence_cost(m.simplified.net, r.abstract_run) + r.target->cost - r.target->graph_cost,
              r.plan->total_cost);
    // Endpoint multiset equals the final marking.
    Marking ends(q.place_count());
    for (const auto& path : r.plan->per_agent_paths) ++ends[m.grid.place_at(path.back())];
    EXPECT_EQ(ends, tr.final_marking);
  }
}

#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace tamp;

TEST(BoolSpec, ParsesExample1) {
  const BooleanSpec s = parse_spec("visit(2) & end(3) & !visit(1)");
  EXPECT_EQ(s.trajectory_clauses, (std::vector<std::vector<std::string>>{{"2"}}));
  EXPECT_EQ(s.final_clauses, (std::vector<std::vector<std::string>>{{"3"}}));
  ASSERT_EQ(s.forbidden.size(), 1u);
  EXPECT_EQ(s.forbidden[0], (Atom{AtomKind::kVisit, "1"}));
}

TEST(BoolSpec, EmptyAndTrue) {
  EXPECT_TRUE(parse_spec("").empty());
  EXPECT_TRUE(parse_spec("  true ").empty());
  EXPECT_EQ(print_spec(BooleanSpec{}), "true");
}

TEST(BoolSpec, ShapeErrors) {
  EXPECT_THROW(parse_spec("(visit(1) | end(2))"), ShapeError);
  EXPECT_THROW(parse_spec("(visit(1) | !visit(2))"), ShapeError);
  EXPECT_THROW(parse_spec("!(visit(1))"), ShapeError);
  EXPECT_THROW(parse_spec("visit(1) & !visit(1)"), ShapeError);
  EXPECT_THROW(parse_spec("!end(4) & (end(4) | end(5))"), ShapeError);
}

TEST(BoolSpec, SyntaxErrorsHavePositions) {
  try {
    parse_spec("visit(1) & ");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.position(), 11u);
  }
  try {
    parse_spec("visit(1) | visit(2)");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.position(), 9u);
  }
  EXPECT_THROW(parse_spec("go(1)"), SyntaxError);
  EXPECT_THROW(parse_spec("visit()"), SyntaxError);
  EXPECT_THROW(parse_spec("(visit(1)"), SyntaxError);
}

TEST(BoolSpec, PrintIsCanonical) {
  const BooleanSpec s = parse_spec("(visit(b) | visit(a)) & end(3) & !end(1) & !visit(z)");
  EXPECT_EQ(print_spec(s), "(visit(a) | visit(b)) & end(3) & !end(1) & !visit(z)");
  EXPECT_EQ(parse_spec(print_spec(s)), s);
  // A visit and end atom of the same name are different atoms.
  EXPECT_NO_THROW(parse_spec("visit(1) & !end(1)"));
}

TEST(BoolSpecProperty, RoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> name(1, 6);
  for (int trial = 0; trial < 300; ++trial) {
    BooleanSpec s;
    const int nv = trial % 4, ne = (trial / 4) % 3;
    for (int i = 0; i < nv; ++i) {
      std::set<std::string> c;
      for (int k = 0; k <= trial % 3; ++k) c.insert(std::to_string(name(rng)));
      s.trajectory_clauses.emplace_back(c.begin(), c.end());
    }
    for (int i = 0; i < ne; ++i) {
      std::set<std::string> c;
      for (int k = 0; k <= (trial / 3) % 3; ++k) c.insert(std::to_string(name(rng)));
      s.final_clauses.emplace_back(c.begin(), c.end());
    }
    if (trial % 5 == 0) s.forbidden.push_back({AtomKind::kEnd, "x" + std::to_string(trial)});
    const std::string text = print_spec(s);
    EXPECT_EQ(parse_spec(text), s) << text;
    EXPECT_EQ(print_spec(parse_spec(text)), text);
  }
}

TEST(BoolSpec, CompileExample1) {
  const OfflineModel m = prepare_offline(test::example1());
  const PetriNet& qm = m.monitored.net;
  const SpecVectors v = compile_vectors(parse_spec("visit(2) & end(3) & !visit(1)"), qm, m.monitored.indicator_of);
  ASSERT_EQ(v.z.size(), 1u);
  ASSERT_EQ(v.d.size(), 1u);
  const PlaceId ind1 = m.monitored.indicator_of.at("1");
  const PlaceId ind2 = m.monitored.indicator_of.at("2");
  const PlaceId p9 = *m.simplified.abstract_place(8);
  for (PlaceId p = 0; p < qm.place_count(); ++p) {
    EXPECT_EQ(v.z[0][p], p == ind2 ? 1 : 0);
    EXPECT_EQ(v.d[0][p], p == p9 ? 1 : 0);
    EXPECT_EQ(v.g[p], p == ind1 ? 1 : 0);
  }
  const SpecVectors w = compile_vectors(parse_spec("(visit(1) | visit(2))"), qm, m.monitored.indicator_of);
  EXPECT_EQ(w.z[0][ind1], 1);
  EXPECT_EQ(w.z[0][ind2], 1);
  EXPECT_THROW(compile_vectors(parse_spec("visit(9)"), qm, m.monitored.indicator_of), UnknownPropositionError);
  EXPECT_THROW(compile_vectors(parse_spec("end(2)"), qm, m.monitored.indicator_of), UnknownPropositionError);
  EXPECT_THROW(compile_vectors(parse_spec("!end(7)"), qm, m.monitored.indicator_of), UnknownPropositionError);
}

TEST(BoolSpec, HoldsOnExample1Runs) {
  const GridNet g = env_to_pn(test::example1());
  const PetriNet& q = g.net;
  const BooleanSpec s = parse_spec("visit(2) & end(3) & !visit(1)");
  auto run = [&](std::vector<std::pair<PlaceId, PlaceId>> moves) {
    std::vector<TransitionId> sigma;
    for (auto [a, b] : moves) sigma.push_back(*g.move(a, b));
    return replay(q, q.initial_marking(), sigma);
  };
  // p1 -> p4 -> p7 and p8 -> p9.
  auto ok = run({{0, 3}, {3, 6}, {7, 8}});
  EXPECT_TRUE(holds(s, ok.word, ok.final_marking, q));
  // Entering p3 violates !visit(1).
  auto bad = run({{0, 1}, {1, 2}, {2, 5}, {5, 8}, {7, 6}});
  EXPECT_FALSE(holds(s, bad.word, bad.final_marking, q));
  // Nothing moves: visit(2) missing.
  auto idle = run({});
  EXPECT_FALSE(holds(s, idle.word, idle.final_marking, q));
  EXPECT_TRUE(holds(BooleanSpec{}, idle.word, idle.final_marking, q));
  EXPECT_EQ(satisfied_atoms(ok.word, ok.final_marking, q),
            (LabelSet{{AtomKind::kVisit, "2"}, {AtomKind::kEnd, "3"}}));
}

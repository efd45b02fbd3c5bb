#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

using namespace tamp;

TEST(Environment, Example1Loads) {
  const Environment env = test::example1();
  EXPECT_EQ(env.rows, 3);
  EXPECT_EQ(env.cols, 3);
  EXPECT_EQ(env.free_cell_count(), 9u);
  EXPECT_EQ(env.agents.size(), 2u);
  EXPECT_EQ(env.regions.size(), 3u);
}

TEST(Environment, Example1Net) {
  const GridNet g = env_to_pn(test::example1());
  EXPECT_EQ(g.net.place_count(), 9u);
  EXPECT_EQ(g.net.transition_count(), 24u);
  const LabelSet p3{{AtomKind::kVisit, "1"}, {AtomKind::kVisit, "2"}};
  const LabelSet p7{{AtomKind::kVisit, "2"}};
  const LabelSet p9{{AtomKind::kEnd, "3"}};
  EXPECT_EQ(g.net.labels(2), p3);
  EXPECT_EQ(g.net.labels(6), p7);
  EXPECT_EQ(g.net.labels(8), p9);
  for (PlaceId p : {0u, 1u, 3u, 4u, 5u, 7u}) EXPECT_TRUE(g.net.labels(p).empty());
  EXPECT_EQ(g.net.initial_marking(), Marking(std::vector<Count>{1, 0, 0, 0, 0, 0, 0, 1, 0}));
  EXPECT_EQ(g.agent_places, (std::vector<PlaceId>{0, 7}));
}

TEST(Environment, OneByTwoGrid) {
  Environment env;
  env.rows = 1;
  env.cols = 2;
  env.agents = {{0, 0}};
  const GridNet g = env_to_pn(env);
  EXPECT_EQ(g.net.place_count(), 2u);
  EXPECT_EQ(g.net.transition_count(), 2u);
}

TEST(Environment, CentreObstacleRing) {
  Environment env;
  env.rows = env.cols = 3;
  env.obstacles = {{1, 1}};
  env.agents = {{0, 0}};
  validate(env);
  const GridNet g = env_to_pn(env);
  EXPECT_EQ(g.net.place_count(), 8u);
  EXPECT_EQ(g.net.transition_count(), 16u);
}

TEST(Environment, DegenerateOneCell) {
  const Environment env = parse_env_text(R"({"grid":{"rows":1,"cols":1},"agents":[[0,0]]})");
  const GridNet g = env_to_pn(env);
  EXPECT_EQ(g.net.place_count(), 1u);
  EXPECT_EQ(g.net.transition_count(), 0u);
}

TEST(Environment, ValidationErrorsCarryLocation) {
  try {
    parse_env_text(R"({"grid":{"rows":2,"cols":2},"obstacles":[[0,0]],"agents":[[0,0]]})");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.where(), "agents[0]");
  }
  try {
    parse_env_text(R"({"grid":{"rows":2,"cols":2},"agents":[[5,0]]})");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.where(), "agents[0]");
  }
  try {
    parse_env_text(R"({"grid":{"rows":2,"cols":2},"agents":[[0,0]],
      "regions":[{"name":"a","cells":[[0,1]]},{"name":"a","cells":[[1,1]]}]})");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.where(), "regions[1]");
  }
  EXPECT_THROW(parse_env_text("{not json"), ValidationError);
  EXPECT_THROW(parse_env_text(R"({"grid":{"rows":2,"cols":2},"connectivity":8})"), ValidationError);
}

TEST(Environment, MissingFile) { EXPECT_THROW(load_env("/nonexistent/env.json"), ValidationError); }

TEST(Environment, DirectionCostsExtension) {
  const Environment env = parse_env_text(
      R"({"grid":{"rows":1,"cols":2},"agents":[[0,0]],"direction_costs":{"up":1,"down":1,"left":"1/2","right":3}})");
  const GridNet g = env_to_pn(env);
  ASSERT_EQ(g.net.transition_count(), 2u);
  EXPECT_EQ(g.net.cost(0), Cost(3));     // right from (0,0)
  EXPECT_EQ(g.net.cost(1), Cost(1, 2));  // left from (0,1)
}

TEST(Environment, JsonRoundTrip) {
  const Environment env = test::example1();
  const Environment back = parse_env(nlohmann::json::parse(env_to_json(env).dump()));
  EXPECT_EQ(env_to_json(back).dump(), env_to_json(env).dump());
}

TEST(EnvironmentProperty, AdjacencyIsSymmetricAndDeterministic) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Environment env = test::random_env(rng, 2 + trial % 5, 2 + trial % 4, 1 + trial % 3, 1, 0.25);
    const GridNet a = env_to_pn(env);
    const GridNet b = env_to_pn(env);
    ASSERT_EQ(a.net.transition_count(), b.net.transition_count());
    std::set<std::pair<PlaceId, PlaceId>> edges;
    for (TransitionId t = 0; t < a.net.transition_count(); ++t) {
      EXPECT_EQ(a.net.inputs(t)[0], b.net.inputs(t)[0]);
      EXPECT_EQ(a.net.outputs(t)[0], b.net.outputs(t)[0]);
      edges.insert({a.net.inputs(t)[0], a.net.outputs(t)[0]});
    }
    for (const auto& [x, y] : edges) EXPECT_TRUE(edges.count({y, x}));
    EXPECT_EQ(a.net.place_count(), env.free_cell_count());
  }
}

TEST(Render, AsciiLayout) {
  const Environment env = test::example1();
  const std::string txt = render_ascii(env);
  EXPECT_EQ(txt.substr(0, 12), "0.A\n...\nB1C\n");
  EXPECT_NE(txt.find("A L1 visit: 1 2"), std::string::npos);
}

TEST(Render, PlanOverlayAndMismatch) {
  const Environment env = test::example1();
  Plan plan;
  plan.per_agent_paths = {{{0, 0}, {1, 0}, {2, 0}}, {{2, 1}, {2, 2}}};
  plan.total_cost = 3;
  const std::string txt = render_ascii(env, &plan);
  EXPECT_NE(txt.find("agent 0 (2 moves)"), std::string::npos);
  EXPECT_NE(txt.find("agent 1 (1 moves)"), std::string::npos);
  const std::string svg = render_svg(env, &plan);
  EXPECT_EQ(svg.find("<?xml"), 0u);
  EXPECT_NE(svg.find("polyline"), std::string::npos);
  EXPECT_EQ(render_svg(env, &plan), svg);

  Plan bad = plan;
  bad.per_agent_paths[0].push_back({0, 2});  // jump
  EXPECT_THROW(render_ascii(env, &bad), ValidationError);
  bad.per_agent_paths.pop_back();
  EXPECT_THROW(render_svg(env, &bad), ValidationError);
  EXPECT_THROW(parse_render_format("png"), UsageError);
}

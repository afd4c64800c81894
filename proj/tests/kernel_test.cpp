#include <gtest/gtest.h>

#include <random>

#include "dynrank/engines.hpp"
#include "support.hpp"

using namespace dynrank;

TEST(RankContribution, SingleSelfLoopIsFixedPoint) {
  const Graph g = Graph::build({}, 1, true);
  const std::vector<double> r{1.0};
  EXPECT_DOUBLE_EQ(rank_contribution(g, r, 0, 0.85), 1.0);
}

TEST(RankContribution, TwoCycleIsSymmetric) {
  const std::vector<Edge> edges{{0, 1}, {1, 0}};
  const Graph g = Graph::build(edges, 2, true);
  const std::vector<double> r{0.5, 0.5};
  EXPECT_DOUBLE_EQ(rank_contribution(g, r, 0, 0.85), 0.5);
  EXPECT_DOUBLE_EQ(rank_contribution(g, r, 1, 0.85), 0.5);
}

TEST(RankContribution, ChainHead) {
  const std::vector<Edge> edges{{0, 1}, {1, 2}};
  const Graph g = Graph::build(edges, 3, true);
  const std::vector<double> r(3, 1.0 / 3.0);
  EXPECT_NEAR(rank_contribution(g, r, 0, 0.85), 0.05 + 0.85 * (1.0 / 3.0) / 2.0, 1e-15);
  EXPECT_NEAR(rank_contribution(g, r, 0, 0.85), 0.19167, 1e-5);
  EXPECT_THROW(rank_contribution(g, std::vector<double>(2, 0.5), 0, 0.85), std::invalid_argument);
}

TEST(RankContribution, OracleFixedPointIsPreserved) {
  const Graph g = support::random_graph(60, 4, 2);
  const auto oracle = support::dense_solve_pagerank(g);
  for (VertexId v = 0; v < 60; ++v) EXPECT_NEAR(rank_contribution(g, oracle, v, 0.85), oracle[v], 1e-14);
}

TEST(LinfNorm, Examples) {
  EXPECT_DOUBLE_EQ(linf_norm(std::vector<double>{0.1, 0.2}, std::vector<double>{0.15, 0.2}), 0.05);
  const std::vector<double> x{1, 2, 3};
  EXPECT_EQ(linf_norm(x, x), 0.0);
  EXPECT_THROW(linf_norm(std::vector<double>{1}, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST(LinfNorm, MatchesScalarLoop) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> a(1000), b(1000);
  for (auto& x : a) x = u(rng);
  for (auto& x : b) x = u(rng);
  double expected = 0;
  for (int i = 0; i < 1000; ++i) expected = std::max(expected, std::abs(a[i] - b[i]));
  EXPECT_EQ(linf_norm(a, b), expected);
}

TEST(VisitDfs, LoneSelfLoopMarksStart) {
  const Graph g = Graph::build({}, 4, true);
  FlagVectors flags(4);
  visit_dfs(flags, g, 2, true);
  EXPECT_EQ(flags.affected_vertices(), (std::vector<VertexId>{2}));
  EXPECT_TRUE(flags.not_converged(2));
}

TEST(VisitDfs, RingMarksAll) {
  std::vector<Edge> ring;
  for (VertexId v = 0; v < 10; ++v) ring.push_back({v, (v + 1) % 10});
  const Graph g = Graph::build(ring, 10, true);
  FlagVectors flags(10);
  visit_dfs(flags, g, 6);
  EXPECT_EQ(flags.count_affected(), 10u);
  EXPECT_FALSE(flags.not_converged(0));
}

TEST(VisitDfs, RandomDagMatchesTransitiveClosure) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 100;
    std::vector<Edge> edges;
    for (VertexId u = 0; u < n; ++u)
      for (VertexId v = u + 1; v < n; ++v)
        if (rng() % 40 == 0) edges.push_back({u, v});
    const Graph g = Graph::build(edges, n, trial % 2 == 0);
    const auto closure = support::transitive_closure(g);
    for (VertexId start = 0; start < n; start += 7) {
      FlagVectors flags(n);
      visit_dfs(flags, g, start);
      for (VertexId v = 0; v < n; ++v) ASSERT_EQ(flags.affected(v), closure[start][v]);
    }
  }
}

TEST(VisitDfs, DeepChainDoesNotOverflow) {
  const std::size_t n = 1'000'000;
  std::vector<Edge> chain;
  for (VertexId v = 0; v + 1 < n; ++v) chain.push_back({v, v + 1});
  const Graph g = Graph::build(chain, n, false);
  FlagVectors flags(n);
  visit_dfs(flags, g, 0);
  EXPECT_EQ(flags.count_affected(), n);
}

TEST(MarkInitialAffected, WorkedExampleWithoutSelfLoops) {
  const std::vector<Edge> edges{{7, 8}, {10, 11}};
  const Graph prev = Graph::build(edges, 12, false);
  const BatchUpdate batch{{{10, 11}}, {{7, 9}}};
  const Graph curr = apply_batch(prev, batch);
  FlagVectors flags(12);
  mark_initial_affected(prev, curr, batch, flags, true);
  EXPECT_EQ(flags.affected_vertices(), (std::vector<VertexId>{8, 9, 11}));
  for (VertexId v : {8u, 9u, 11u}) EXPECT_TRUE(flags.not_converged(v));
  EXPECT_TRUE(flags.checked(7));
  EXPECT_TRUE(flags.checked(10));
}

TEST(MarkInitialAffected, SelfLoopsMarkSources) {
  const std::vector<Edge> edges{{7, 8}, {10, 11}};
  const Graph prev = Graph::build(edges, 12, true);
  const BatchUpdate batch{{{10, 11}}, {{7, 9}}};
  const Graph curr = apply_batch(prev, batch);
  FlagVectors flags(12);
  mark_initial_affected(prev, curr, batch, flags);
  EXPECT_EQ(flags.affected_vertices(), (std::vector<VertexId>{7, 8, 9, 10, 11}));
}

TEST(MarkInitialAffected, EmptyBatchAndUnchangedOutSet) {
  const Graph g = support::random_graph(30, 3, 4);
  FlagVectors none(30);
  mark_initial_affected(g, g, {}, none);
  EXPECT_EQ(none.count_affected(), 0u);

  // Source whose out-set is the same in both snapshots marks just that set.
  const auto out = g.out_neighbors(5);
  const BatchUpdate fake{{}, {{5, out.back()}}};
  FlagVectors flags(30);
  mark_initial_affected(g, g, fake, flags);
  EXPECT_EQ(flags.affected_vertices(), std::vector<VertexId>(out.begin(), out.end()));
}

TEST(MarkTraversalAffected, WorkedExampleMatchesBfs) {
  const std::vector<Edge> edges{{7, 8}, {10, 11}, {8, 3}, {3, 4}, {9, 0}};
  const Graph prev = Graph::build(edges, 12, false);
  const BatchUpdate batch{{{10, 11}}, {{7, 9}}};
  const Graph curr = apply_batch(prev, batch);
  FlagVectors flags(12);
  mark_traversal_affected(prev, curr, batch, flags);
  const auto oracle = support::reachable_from(curr, {8, 9, 11});
  for (VertexId v = 0; v < 12; ++v) EXPECT_EQ(flags.affected(v), oracle[v] != 0) << v;
  EXPECT_EQ(flags.affected_vertices(), (std::vector<VertexId>{0, 3, 4, 8, 9, 11}));
}

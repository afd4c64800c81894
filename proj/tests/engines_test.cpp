#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>

#include "dynrank/engines.hpp"
#include "dynrank/updates.hpp"
#include "support.hpp"

using namespace dynrank;

namespace {

PageRankConfig tight(unsigned threads = 1, std::size_t chunk = 2048) {
  PageRankConfig cfg;
  cfg.iteration_tolerance = 1e-13;
  cfg.num_threads = threads;
  cfg.chunk_size = chunk;
  return cfg;
}

struct Scenario {
  Graph prev;
  Graph curr;
  BatchUpdate batch;
  RankVector prev_ranks;
};

Scenario make_scenario(std::size_t n, double degree, double fraction, std::uint64_t seed) {
  Graph prev = support::random_graph(n, degree, seed);
  BatchSpec spec;
  spec.size_fraction = fraction;
  spec.rng_seed = seed;
  BatchUpdate batch = generate_random_batch(prev, spec);
  Graph curr = apply_batch(prev, batch);
  RankVector ranks = support::dense_solve_pagerank(prev);
  return {std::move(prev), std::move(curr), std::move(batch), std::move(ranks)};
}

RunReport run(EngineId id, const Scenario& s, const PageRankConfig& cfg,
              const RunOptions& opts = {}) {
  return run_engine(id, s.prev, s.curr, s.batch, s.prev_ranks, cfg, opts);
}

}  // namespace

TEST(EngineIds, ParseAndFamilies) {
  EXPECT_EQ(all_engines().size(), 8u);
  for (EngineId id : all_engines()) {
    EXPECT_EQ(parse_engine_id(to_string(id)), id);
    EXPECT_EQ(is_lock_free(static_counterpart(id)), is_lock_free(id));
  }
  try {
    parse_engine_id("df-xx");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("df-lf"), std::string::npos);
  }
}

TEST(Config, Validation) {
  PageRankConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_DOUBLE_EQ(cfg.effective_frontier_tolerance(), 1e-13);
  auto bad = [](auto mutate) {
    PageRankConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), std::invalid_argument);
  };
  bad([](auto& c) { c.damping = 1.0; });
  bad([](auto& c) { c.damping = 0.0; });
  bad([](auto& c) { c.iteration_tolerance = 0.0; });
  bad([](auto& c) { c.frontier_tolerance = 1e-9; });
  bad([](auto& c) { c.max_iterations = 0; });
  bad([](auto& c) { c.chunk_size = 0; });
  bad([](auto& c) { c.num_threads = 0; });
  cfg.frontier_tolerance = std::numeric_limits<double>::infinity();
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Engines, SingleVertexHasRankOne) {
  const Graph g = Graph::build({}, 1, true);
  for (EngineId id : all_engines()) {
    const RunReport r = run_engine(id, g, g, {}, std::vector<double>{1.0}, tight());
    EXPECT_TRUE(r.converged()) << to_string(id);
    EXPECT_DOUBLE_EQ(r.ranks[0], 1.0) << to_string(id);
  }
}

TEST(Engines, RingIsUniform) {
  for (std::size_t k : {2u, 5u, 17u}) {
    std::vector<Edge> ring;
    for (VertexId v = 0; v < k; ++v) ring.push_back({v, static_cast<VertexId>((v + 1) % k)});
    const Graph g = Graph::build(ring, k, true);
    const std::vector<double> start(k, 1.0 / static_cast<double>(k));
    for (EngineId id : {EngineId::kStaticBB, EngineId::kStaticLF}) {
      const RunReport r = run_engine(id, g, g, {}, start, tight());
      for (double x : r.ranks) EXPECT_NEAR(x, 1.0 / static_cast<double>(k), 1e-12);
    }
  }
}

TEST(Engines, ThreeChainMatchesClosedForm) {
  const std::vector<Edge> chain{{0, 1}, {1, 2}};
  const Graph g = Graph::build(chain, 3, true);
  const double b = 0.15 / 3, a = 0.85;
  const double r0 = b / (1 - a / 2);
  const double r1 = (b + a * r0 / 2) / (1 - a / 2);
  const double r2 = (b + a * r1 / 2) / (1 - a);
  for (EngineId id : {EngineId::kStaticBB, EngineId::kStaticLF}) {
    const RunReport r = run_engine(id, g, g, {}, {}, tight());
    EXPECT_NEAR(r.ranks[0], r0, 1e-12);
    EXPECT_NEAR(r.ranks[1], r1, 1e-12);
    EXPECT_NEAR(r.ranks[2], r2, 1e-12);
  }
}

TEST(Engines, AllMatchDenseOracleOnRandomBatches) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Scenario s = make_scenario(300, 4, seed % 2 ? 0.01 : 0.05, seed);
    const auto oracle = support::dense_solve_pagerank(s.curr);
    for (unsigned threads : {1u, 4u}) {
      for (EngineId id : all_engines()) {
        const RunReport r = run(id, s, tight(threads, 16));
        ASSERT_TRUE(r.converged()) << to_string(id) << " " << to_string(r.status) << " "
                                   << r.iterations;
        EXPECT_LT(support::max_abs_diff(r.ranks, oracle), 1e-10)
            << to_string(id) << " threads=" << threads << " seed=" << seed;
      }
    }
  }
}

TEST(Engines, DefaultToleranceWithinOneEMinusNine) {
  const Scenario s = make_scenario(1000, 6, 1e-3, 77);
  const auto oracle = support::dense_power_pagerank(s.curr);
  for (EngineId id : all_engines()) {
    PageRankConfig cfg;
    cfg.num_threads = 3;
    cfg.chunk_size = 64;
    const RunReport r = run(id, s, cfg);
    EXPECT_LT(support::max_abs_diff(r.ranks, oracle), 1e-9) << to_string(id);
  }
}

TEST(Engines, PerChunkConvergenceMatchesOracle) {
  const Scenario s = make_scenario(400, 5, 0.02, 9);
  const auto oracle = support::dense_solve_pagerank(s.curr);
  for (EngineId id : {EngineId::kStaticLF, EngineId::kNaiveDynamicLF, EngineId::kTraversalLF,
                      EngineId::kFrontierLF}) {
    PageRankConfig cfg = tight(4, 32);
    cfg.per_chunk_convergence = true;
    const RunReport r = run(id, s, cfg);
    ASSERT_TRUE(r.converged()) << to_string(id);
    EXPECT_LT(support::max_abs_diff(r.ranks, oracle), 1e-10) << to_string(id);
  }
}

TEST(Engines, RanksNeverFallBelowTeleport) {
  const Scenario s = make_scenario(200, 3, 0.05, 3);
  const double floor = 0.15 / 200.0;
  for (EngineId id : all_engines()) {
    const RunReport r = run(id, s, tight(2, 8));
    for (double x : r.ranks) EXPECT_GE(x, floor - 1e-15) << to_string(id);
  }
}

TEST(Engines, IterationLimitIsNotConvergence) {
  const Scenario s = make_scenario(200, 3, 0.05, 4);
  PageRankConfig cfg = tight(2, 16);
  cfg.max_iterations = 2;
  for (EngineId id : {EngineId::kStaticBB, EngineId::kStaticLF}) {
    const RunReport r = run(id, s, cfg);
    EXPECT_EQ(r.status, RunStatus::kIterationLimit) << to_string(id);
    EXPECT_FALSE(r.converged());
    EXPECT_LE(r.iterations, 2u);
  }
}

TEST(Engines, InputErrors) {
  const Scenario s = make_scenario(50, 3, 0.1, 5);
  const PageRankConfig cfg = tight();
  const RankVector short_ranks(49, 0.02);
  for (EngineId id : all_engines()) {
    if (id == EngineId::kStaticBB || id == EngineId::kStaticLF) continue;
    EXPECT_THROW(run_engine(id, s.prev, s.curr, s.batch, short_ranks, cfg), std::invalid_argument)
        << to_string(id);
  }
  const Graph other = support::random_graph(60, 3, 5);
  EXPECT_THROW(df_bb(s.prev, other, s.batch, s.prev_ranks, cfg), std::invalid_argument);
  const BatchUpdate out_of_range{{}, {{0, 50}}};
  EXPECT_THROW(dt_lf(s.prev, s.curr, out_of_range, s.prev_ranks, cfg), std::invalid_argument);
  PageRankConfig broken = cfg;
  broken.damping = 2;
  EXPECT_THROW(static_bb(s.curr, broken), std::invalid_argument);
}

TEST(NaiveDynamic, FixedPointIsStable) {
  const Scenario s = make_scenario(300, 4, 0.01, 10);
  const auto oracle = support::dense_solve_pagerank(s.curr);
  for (auto fn : {&nd_bb, &nd_lf}) {
    const RunReport r = fn(s.curr, oracle, tight(2, 32), {});
    EXPECT_TRUE(r.converged());
    EXPECT_LE(r.iterations, 2u);
    EXPECT_LT(support::max_abs_diff(r.ranks, oracle), 1e-13);
  }
}

TEST(NaiveDynamic, UniformStartEqualsStatic) {
  const Graph g = support::random_graph(300, 4, 12);
  const std::vector<double> uniform(300, 1.0 / 300);
  EXPECT_EQ(nd_bb(g, uniform, tight(2, 16)).ranks, static_bb(g, tight(2, 16)).ranks);
  EXPECT_EQ(nd_lf(g, uniform, tight(1, 16)).ranks, static_lf(g, tight(1, 16)).ranks);
}

TEST(Traversal, AffectedSetMatchesBfsOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Scenario s = make_scenario(400, 1.2, 0.005, seed + 100);
    const auto oracle = support::traversal_oracle(s.prev, s.curr, s.batch);
    std::size_t expected = 0;
    for (auto f : oracle) expected += f;
    for (auto fn : {&dt_bb, &dt_lf}) {
      const RunReport r = fn(s.prev, s.curr, s.batch, s.prev_ranks, tight(3, 16), {});
      EXPECT_EQ(r.affected_initial, expected);
      EXPECT_EQ(r.affected_total, expected);
      ASSERT_EQ(r.affected.size(), oracle.size());
      for (std::size_t v = 0; v < oracle.size(); ++v) ASSERT_EQ(r.affected[v], oracle[v]) << v;
      // Unaffected vertices keep their previous rank exactly.
      for (std::size_t v = 0; v < oracle.size(); ++v)
        if (!oracle[v]) ASSERT_EQ(r.ranks[v], s.prev_ranks[v]);
    }
  }
}

TEST(Traversal, EverythingAffectedMatchesNaiveDynamic) {
  // A ring makes every vertex reachable from any source.
  std::vector<Edge> ring;
  for (VertexId v = 0; v < 100; ++v) ring.push_back({v, (v + 1) % 100});
  const Graph prev = Graph::build(ring, 100, true);
  const BatchUpdate batch{{}, {{0, 50}}};
  const Graph curr = apply_batch(prev, batch);
  const auto prev_ranks = support::dense_solve_pagerank(prev);
  const RunReport dt = dt_bb(prev, curr, batch, prev_ranks, tight(2, 8));
  EXPECT_EQ(dt.affected_total, 100u);
  EXPECT_EQ(dt.ranks, nd_bb(curr, prev_ranks, tight(2, 8)).ranks);
}

TEST(Traversal, EmptyBatchIsNoOp) {
  const Graph g = support::random_graph(100, 3, 13);
  const auto ranks = support::dense_solve_pagerank(g);
  for (EngineId id : {EngineId::kTraversalBB, EngineId::kTraversalLF, EngineId::kFrontierBB,
                      EngineId::kFrontierLF}) {
    const RunReport r = run_engine(id, g, g, {}, ranks, tight(2));
    EXPECT_TRUE(r.converged()) << to_string(id);
    EXPECT_EQ(r.affected_total, 0u);
    EXPECT_EQ(r.ranks, ranks) << to_string(id);
  }
}

TEST(Frontier, InfiniteFrontierToleranceFreezesAffectedSet) {
  const Scenario s = make_scenario(300, 4, 0.01, 14);
  PageRankConfig cfg = tight(2, 16);
  cfg.frontier_tolerance = std::numeric_limits<double>::infinity();
  for (auto fn : {&df_bb, &df_lf}) {
    const RunReport r = fn(s.prev, s.curr, s.batch, s.prev_ranks, cfg, {});
    EXPECT_EQ(r.affected_total, r.affected_initial);
    FlagVectors initial(300);
    mark_initial_affected(s.prev, s.curr, s.batch, initial);
    EXPECT_EQ(r.affected, initial.affected_snapshot());
  }
}

TEST(Frontier, SingleEdgeBatchStaysLocal) {
  const Scenario s = make_scenario(100, 3, 0.0, 15);
  BatchUpdate batch{{}, {}};
  for (VertexId v = 1; v < 100; ++v)
    if (!s.prev.has_edge(0, v)) {
      batch.insertions.push_back({0, v});
      break;
    }
  const Graph curr = apply_batch(s.prev, batch);
  const auto oracle = support::dense_solve_pagerank(curr);
  for (auto fn : {&df_bb, &df_lf}) {
    const RunReport r = fn(s.prev, curr, batch, s.prev_ranks, tight(2, 8), {});
    EXPECT_EQ(r.affected_initial, s.prev.out_degree(0) + 1);
    EXPECT_GE(r.affected_total, r.affected_initial);
    EXPECT_LT(support::max_abs_diff(r.ranks, oracle), 1e-10);
  }
}

TEST(Frontier, AffectedSubsetOfTraversal) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Scenario s = make_scenario(500, 2, 0.002, seed + 200);
    const auto reach = support::traversal_oracle(s.prev, s.curr, s.batch);
    PageRankConfig cfg;
    cfg.num_threads = 3;
    cfg.chunk_size = 16;
    for (auto fn : {&df_bb, &df_lf}) {
      const RunReport r = fn(s.prev, s.curr, s.batch, s.prev_ranks, cfg, {});
      for (std::size_t v = 0; v < reach.size(); ++v)
        if (r.affected[v]) ASSERT_TRUE(reach[v]) << v;
      for (std::size_t v = 0; v < reach.size(); ++v)
        if (!r.affected[v]) ASSERT_EQ(r.ranks[v], s.prev_ranks[v]);
    }
  }
}

TEST(Frontier, LockFreeManyWorkersRepeated) {
  const Scenario s = make_scenario(500, 4, 0.01, 16);
  const auto oracle = support::dense_solve_pagerank(s.curr);
  PageRankConfig cfg;
  cfg.num_threads = 8;
  cfg.chunk_size = 8;
  for (int run_index = 0; run_index < 100; ++run_index) {
    const RunReport r = df_lf(s.prev, s.curr, s.batch, s.prev_ranks, cfg);
    ASSERT_TRUE(r.converged()) << run_index;
    ASSERT_LT(support::max_abs_diff(r.ranks, oracle), 1e-9) << run_index;
  }
}

namespace {

// Watches every flag vector on each claim and records any cleared flag that
// had been observed set.
class MonotoneWatcher : public WorkerObserver {
 public:
  void on_run_start(const FlagVectors& flags, std::size_t n, unsigned) override {
    flags_ = &flags;
    affected_.assign(n, 0);
    checked_.assign(n, 0);
  }
  bool on_chunk_claimed(unsigned, Phase, std::size_t, std::size_t) override {
    std::lock_guard lock(mutex_);
    for (VertexId v = 0; v < affected_.size(); ++v) {
      const bool a = flags_->affected(v), c = flags_->checked(v);
      if ((affected_[v] && !a) || (checked_[v] && !c)) ++violations;
      affected_[v] |= a;
      checked_[v] |= c;
    }
    ++samples;
    return true;
  }
  int violations = 0;
  int samples = 0;

 private:
  std::mutex mutex_;
  const FlagVectors* flags_ = nullptr;
  std::vector<std::uint8_t> affected_, checked_;
};

}  // namespace

TEST(Flags, AffectedAndCheckedOnlyRise) {
  const Scenario s = make_scenario(300, 3, 0.02, 17);
  for (EngineId id : {EngineId::kTraversalBB, EngineId::kTraversalLF, EngineId::kFrontierBB,
                      EngineId::kFrontierLF}) {
    MonotoneWatcher watcher;
    RunOptions opts;
    opts.observer = &watcher;
    const RunReport r = run(id, s, tight(3, 8), opts);
    EXPECT_TRUE(r.converged());
    EXPECT_GT(watcher.samples, 10) << to_string(id);
    EXPECT_EQ(watcher.violations, 0) << to_string(id);
  }
}

TEST(Determinism, BarrierEnginesAreBitIdenticalUnderStaticSchedule) {
  const Scenario s = make_scenario(600, 4, 0.01, 18);
  for (EngineId id : all_engines()) {
    if (is_lock_free(id)) continue;
    PageRankConfig one = tight(1, 32), many = tight(4, 32);
    one.schedule = many.schedule = Schedule::kStatic;
    const RunReport base = run(id, s, one);
    for (int rep = 0; rep < 5; ++rep) {
      const RunReport r = run(id, s, many);
      ASSERT_EQ(r.ranks, base.ranks) << to_string(id);
      ASSERT_EQ(r.iterations, base.iterations);
      ASSERT_EQ(r.affected, base.affected);
    }
  }
}

TEST(Determinism, LockFreeRunsAgreeWithinTolerance) {
  const Scenario s = make_scenario(600, 4, 0.01, 19);
  for (EngineId id : all_engines()) {
    if (!is_lock_free(id)) continue;
    PageRankConfig cfg;
    cfg.num_threads = 4;
    cfg.chunk_size = 32;
    const RunReport base = run(id, s, cfg);
    for (int rep = 0; rep < 5; ++rep)
      EXPECT_LT(support::max_abs_diff(run(id, s, cfg).ranks, base.ranks), 2e-9) << to_string(id);
  }
}

TEST(Observer, SeesEveryVertexUpdate) {
  struct Counter : WorkerObserver {
    std::atomic<std::uint64_t> processed{0};
    std::atomic<int> starts{0}, ends{0};
    void on_run_start(const FlagVectors&, std::size_t, unsigned) override { ++starts; }
    void on_vertex_processed(unsigned, std::size_t, VertexId) override { ++processed; }
    void on_run_end() override { ++ends; }
  } counter;
  const Graph g = support::random_graph(200, 3, 20);
  RunOptions opts;
  opts.observer = &counter;
  const RunReport r = static_lf(g, tight(3, 16), opts);
  EXPECT_EQ(counter.processed.load(), r.vertex_updates);
  EXPECT_EQ(counter.starts.load(), 1);
  EXPECT_EQ(counter.ends.load(), 1);
}

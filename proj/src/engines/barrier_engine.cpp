// Barrier-based engines: synchronous iterations over two rank vectors with a
// full-team rendezvous after marking and after every iteration.

#include <algorithm>
#include <cmath>

#include "internal.hpp"

namespace dynrank::detail {

namespace {

enum class Claim : std::uint8_t { kClaimed, kExhausted, kCrashed };

struct alignas(64) BarrierWorker {
  double max_delta = 0.0;
  std::vector<VertexId> spill;  // frontier vertices awaiting out-neighbor marking
  std::vector<VertexId> stack;
  std::uint64_t updates = 0;
  bool crashed = false;
};

}  // namespace

RunReport run_barrier_based(const Problem& p, const PageRankConfig& cfg, const RunOptions& opts) {
  const Graph& g = p.curr;
  const std::size_t n = g.num_vertices();
  const unsigned team_size = cfg.num_threads;
  const std::size_t chunk = cfg.chunk_size;
  const bool restricted = needs_marking(p.variant);
  const bool frontier = p.variant == Variant::kFrontier;
  const double damping = cfg.damping;
  const double base = (1.0 - damping) / static_cast<double>(n);
  const double tolerance = cfg.iteration_tolerance;
  const double frontier_tolerance = cfg.effective_frontier_tolerance();
  WorkerObserver* observer = opts.observer;

  std::vector<double> current = initial_ranks(p);
  std::vector<double> next = current;
  FlagVectors flags(n);
  const std::vector<Edge> edges = batch_edges(p.batch);
  const std::size_t vertex_chunks = (n + chunk - 1) / chunk;
  const std::size_t edge_chunks = (edges.size() + chunk - 1) / chunk;
  std::vector<BarrierWorker> workers(team_size);
  for (auto& st : workers) st.spill.reserve(restricted ? 64 : 0);

  std::atomic<std::size_t> next_chunk{0};
  double* r_read = current.data();
  double* r_write = next.data();
  std::size_t iterations = 0;
  bool done = false;
  RunStatus status = RunStatus::kIterationLimit;
  std::atomic<bool> aborted{false};

  if (observer) observer->on_run_start(flags, n, team_size);
  const auto start = Clock::now();
  TeamBarrier barrier(team_size, deadline_from(opts, start));

  auto worker_fn = [&](unsigned w) {
    BarrierWorker& st = workers[w];
    std::size_t round = 0;

    // Hands out chunk indices from the shared counter, or w, w+T, ... under
    // static scheduling; then gives the observer its chance to crash us.
    auto claim = [&](Phase phase, std::size_t iteration, std::size_t pool_chunks,
                     std::size_t pool_size, std::size_t& index) {
      index = cfg.schedule == Schedule::kStatic ? w + round++ * team_size
                                                : next_chunk.fetch_add(1, std::memory_order_relaxed);
      const bool exhausted = index >= pool_chunks;
      const std::size_t position = exhausted ? pool_size : index * chunk;
      if (observer && !observer->on_chunk_claimed(w, phase, iteration, position)) {
        st.crashed = true;
        return Claim::kCrashed;
      }
      return exhausted ? Claim::kExhausted : Claim::kClaimed;
    };
    auto wait = [&](auto&& completion) {
      round = 0;
      if (barrier.arrive_and_wait(completion)) return true;
      aborted.store(true, std::memory_order_relaxed);
      return false;
    };

    if (restricted) {
      if (observer) observer->on_phase_entered(w, Phase::kMarking);
      for (std::size_t index;;) {
        const Claim c = claim(Phase::kMarking, 0, edge_chunks, edges.size(), index);
        if (c == Claim::kCrashed) return;
        if (c == Claim::kExhausted) break;
        const std::size_t end = std::min(edges.size(), (index + 1) * chunk);
        for (std::size_t i = index * chunk; i < end; ++i) {
          for_each_union_out(*p.prev, g, edges[i].source, [&](VertexId v) {
            if (frontier)
              flags.mark_affected(v);
            else
              dfs_mark(flags, g, v, st.stack, [](VertexId) {});
          });
        }
      }
      if (!wait([&] { next_chunk.store(0, std::memory_order_relaxed); })) return;
    }

    if (observer) observer->on_phase_entered(w, Phase::kRanking);
    while (true) {
      const std::size_t iteration = iterations;
      for (std::size_t index;;) {
        const Claim c = claim(Phase::kRanking, iteration, vertex_chunks, n, index);
        if (c == Claim::kCrashed) return;
        if (c == Claim::kExhausted) break;
        const std::size_t end = std::min(n, (index + 1) * chunk);
        for (std::size_t i = index * chunk; i < end; ++i) {
          const auto v = static_cast<VertexId>(i);
          if (restricted && !flags.affected(v)) continue;
          const double r = compute_rank(g, v, base, damping, [&](VertexId u) { return r_read[u]; });
          const double delta = std::abs(r - r_read[v]);
          r_write[v] = r;
          st.max_delta = std::max(st.max_delta, delta);
          ++st.updates;
          if (frontier && delta > frontier_tolerance) st.spill.push_back(v);
          if (observer) observer->on_vertex_processed(w, iteration, v);
        }
      }
      // Runs on the last arriving worker while the rest of the team waits.
      // Frontier marks are applied here so that an iteration sees exactly the
      // affected set left by the previous one.
      const bool passed = wait([&] {
        double norm = 0.0;
        for (auto& other : workers) {
          norm = std::max(norm, other.max_delta);
          other.max_delta = 0.0;
          for (VertexId v : other.spill)
            for (VertexId t : g.out_neighbors(v)) flags.mark_affected(t);
          other.spill.clear();
        }
        std::swap(r_read, r_write);
        ++iterations;
        next_chunk.store(0, std::memory_order_relaxed);
        if (norm <= tolerance) {
          status = RunStatus::kConverged;
          done = true;
        } else if (iterations >= cfg.max_iterations) {
          done = true;
        }
      });
      if (!passed || done) return;
    }
  };
  run_team(team_size, worker_fn);

  RunReport report;
  report.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (observer) observer->on_run_end();
  report.iterations = iterations;
  report.status = aborted.load() ? RunStatus::kAborted : status;
  for (const auto& st : workers) {
    report.vertex_updates += st.updates;
    report.crashed_workers += st.crashed ? 1 : 0;
  }
  report.ranks = r_read == current.data() ? std::move(current) : std::move(next);
  fill_affected_stats(p, flags, report);
  return report;
}

}  // namespace dynrank::detail

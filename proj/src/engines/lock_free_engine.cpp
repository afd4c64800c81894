// Lock-free engines: one shared rank vector updated in place, per-vertex
// convergence flags, and no team-wide synchronization. Each worker counts its
// own iterations and claims work from a fresh pool per iteration, so a
// stalled or crashed worker only delays the chunk it held.

#include <algorithm>
#include <cmath>
#include <thread>

#include "internal.hpp"

namespace dynrank::detail {

namespace {

struct alignas(64) Pool {
  std::atomic<std::size_t> next{0};
  // Ranking pools only: chunks fully processed, and whether any of them
  // changed a rank by more than the iteration tolerance.
  std::atomic<std::size_t> completed{0};
  std::atomic<bool> dirty{false};
};

struct alignas(64) LockFreeWorker {
  std::size_t iterations = 0;
  std::uint64_t updates = 0;
  std::vector<VertexId> stack;
  bool crashed = false;
  bool aborted = false;
  // Odd while the worker is inside a claimed ranking chunk.
  std::atomic<std::uint64_t> chunk_epoch{0};
};

// One byte per vertex chunk: does the chunk still hold a not-converged vertex?
// Writers raise the vertex flag before the chunk flag; the scanner lowers the
// chunk flag before reading vertex flags. Sequential consistency on both
// guarantees a raise is never lost between the two.
class ChunkFlags {
 public:
  ChunkFlags(std::size_t chunks, bool initial) : flags_(chunks, initial ? 1 : 0) {}

  void raise(std::size_t c) noexcept {
    std::atomic_ref<std::uint8_t> f(flags_[c]);
    if (!f.load(std::memory_order_seq_cst)) f.store(1, std::memory_order_seq_cst);
  }
  void lower(std::size_t c) noexcept {
    std::atomic_ref<std::uint8_t>(flags_[c]).store(0, std::memory_order_seq_cst);
  }
  bool all_clear() const noexcept {
    for (auto& f : flags_)
      if (std::atomic_ref<std::uint8_t>(const_cast<std::uint8_t&>(f)).load(std::memory_order_seq_cst))
        return false;
    return true;
  }

 private:
  std::vector<std::uint8_t> flags_;
};

}  // namespace

RunReport run_lock_free(const Problem& p, const PageRankConfig& cfg, const RunOptions& opts) {
  const Graph& g = p.curr;
  const std::size_t n = g.num_vertices();
  const unsigned team_size = cfg.num_threads;
  const std::size_t chunk = cfg.chunk_size;
  const bool restricted = needs_marking(p.variant);
  const bool frontier = p.variant == Variant::kFrontier;
  const bool per_chunk = cfg.per_chunk_convergence;
  const double damping = cfg.damping;
  const double base = (1.0 - damping) / static_cast<double>(n);
  const double tolerance = cfg.iteration_tolerance;
  const double frontier_tolerance = cfg.effective_frontier_tolerance();
  WorkerObserver* observer = opts.observer;

  std::vector<double> ranks = initial_ranks(p);
  FlagVectors flags(n);
  // Static and naive-dynamic runs start with every vertex unconverged so the
  // all-converged exit test has something to wait for.
  if (!restricted) flags.set_all_not_converged();
  const std::vector<Edge> edges = batch_edges(p.batch);
  const std::size_t vertex_chunks = (n + chunk - 1) / chunk;
  const std::size_t edge_chunks = (edges.size() + chunk - 1) / chunk;
  std::vector<Pool> pools(cfg.max_iterations);
  Pool marking_pool;
  ChunkFlags chunk_flags(per_chunk ? vertex_chunks : 0, !restricted);
  std::vector<LockFreeWorker> workers(team_size);
  // One past the latest ranking pool whose chunks all finished without a
  // change above the tolerance.
  std::atomic<std::size_t> clean_sweeps{0};

  auto raise_not_converged = [&](VertexId v) {
    if (per_chunk) {
      flags.set_not_converged<std::memory_order_seq_cst>(v);
      chunk_flags.raise(v / chunk);
    } else {
      flags.set_not_converged(v);
    }
  };
  auto all_converged = [&] { return per_chunk ? chunk_flags.all_clear() : flags.all_converged(); };

  if (observer) observer->on_run_start(flags, n, team_size);
  const auto start = Clock::now();
  const auto deadline = deadline_from(opts, start);

  auto worker_fn = [&](unsigned w) {
    LockFreeWorker& st = workers[w];

    // Claims the next chunk of `pool`. Returns false when the worker must stop:
    // crashed by the observer or past the watchdog deadline.
    auto claim = [&](Pool& pool, Phase phase, std::size_t iteration, std::size_t pool_chunks,
                     std::size_t pool_size, std::size_t& index) {
      index = pool.next.fetch_add(1, std::memory_order_relaxed);
      const std::size_t position = index < pool_chunks ? index * chunk : pool_size;
      if (observer && !observer->on_chunk_claimed(w, phase, iteration, position)) {
        st.crashed = true;
        return false;
      }
      if (deadline && Clock::now() > *deadline) {
        st.aborted = true;
        return false;
      }
      return true;
    };

    auto process_source = [&](VertexId u) {
      for_each_union_out(*p.prev, g, u, [&](VertexId v) {
        if (frontier) {
          flags.mark_affected(v);
          raise_not_converged(v);
        } else {
          dfs_mark(flags, g, v, st.stack, raise_not_converged);
        }
      });
      flags.mark_checked(u);
    };

    if (restricted) {
      if (observer) observer->on_phase_entered(w, Phase::kMarking);
      for (std::size_t index;;) {
        if (!claim(marking_pool, Phase::kMarking, 0, edge_chunks, edges.size(), index)) return;
        if (index >= edge_chunks) break;
        st.chunk_epoch.fetch_add(1, std::memory_order_seq_cst);
        const std::size_t end = std::min(edges.size(), (index + 1) * chunk);
        for (std::size_t i = index * chunk; i < end; ++i)
          if (!flags.checked(edges[i].source)) process_source(edges[i].source);
        st.chunk_epoch.fetch_add(1, std::memory_order_release);
      }
      // Help with sources whose claimant has not finished, or never will.
      for (bool all_checked = false; !all_checked;) {
        all_checked = true;
        for (const Edge& e : edges) {
          if (flags.checked(e.source)) continue;
          all_checked = false;
          st.chunk_epoch.fetch_add(1, std::memory_order_seq_cst);
          process_source(e.source);
          st.chunk_epoch.fetch_add(1, std::memory_order_release);
        }
      }
    }

    // A worker that sees every flag clear waits until each chunk that was in
    // flight at that moment has finished, since such a chunk may have read
    // ranks long ago and will write them back late, or may still be marking
    // vertices affected. Only then does it confirm convergence and leave.
    std::vector<std::uint64_t> in_flight(team_size);
    bool armed = false;
    std::size_t armed_at = 0;
    auto settled = [&](std::size_t iteration) {
      if (!armed) {
        armed_at = iteration;
        for (unsigned o = 0; o < team_size; ++o)
          in_flight[o] = workers[o].chunk_epoch.load(std::memory_order_seq_cst);
        armed = true;
      }
      for (unsigned o = 0; o < team_size; ++o)
        if (o != w && in_flight[o] % 2 == 1 &&
            workers[o].chunk_epoch.load(std::memory_order_acquire) == in_flight[o])
          return false;
      return true;
    };

    if (observer) observer->on_phase_entered(w, Phase::kRanking);
    for (std::size_t iteration = 0; iteration < cfg.max_iterations; ++iteration) {
      st.iterations = iteration + 1;
      for (std::size_t index;;) {
        if (!claim(pools[iteration], Phase::kRanking, iteration, vertex_chunks, n, index)) return;
        if (index >= vertex_chunks) break;
        st.chunk_epoch.fetch_add(1, std::memory_order_seq_cst);
        bool chunk_dirty = false;
        const std::size_t begin = index * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        for (std::size_t i = begin; i < end; ++i) {
          const auto v = static_cast<VertexId>(i);
          if (restricted && !flags.affected(v)) continue;
          const double r =
              compute_rank(g, v, base, damping, [&](VertexId u) { return load_rank(ranks[u]); });
          // Clear before writing and re-raise after: a slower worker that
          // overwrites this rank later then sees the clear and decides the
          // flag from its own change, so a stale late write is never left
          // marked converged.
          if (std::abs(r - load_rank(ranks[v])) <= tolerance) {
            if (per_chunk)
              flags.clear_not_converged<std::memory_order_seq_cst>(v);
            else
              flags.clear_not_converged(v);
          }
          const double delta = std::abs(r - exchange_rank(ranks[v], r));
          ++st.updates;
          if (delta > tolerance) {
            raise_not_converged(v);
            chunk_dirty = true;
          }
          if (frontier && delta > frontier_tolerance) {
            for (VertexId t : g.out_neighbors(v)) {
              flags.mark_affected(t);
              raise_not_converged(t);
            }
          }
          if (observer) observer->on_vertex_processed(w, iteration, v);
        }
        if (per_chunk) {
          chunk_flags.lower(index);
          for (std::size_t i = begin; i < end; ++i) {
            if (flags.not_converged<std::memory_order_seq_cst>(static_cast<VertexId>(i))) {
              chunk_flags.raise(index);
              break;
            }
          }
        }
        Pool& pool = pools[iteration];
        if (chunk_dirty) pool.dirty.store(true, std::memory_order_relaxed);
        if (pool.completed.fetch_add(1, std::memory_order_acq_rel) + 1 == vertex_chunks &&
            !pool.dirty.load(std::memory_order_relaxed)) {
          std::size_t seen = clean_sweeps.load(std::memory_order_relaxed);
          while (seen < iteration + 1 &&
                 !clean_sweeps.compare_exchange_weak(seen, iteration + 1,
                                                     std::memory_order_release))
            ;
        }
        st.chunk_epoch.fetch_add(1, std::memory_order_release);
      }
      // Leave after a complete sweep that changed nothing by more than the
      // tolerance, with every flag clear before and after the handshake.
      if (!all_converged()) {
        armed = false;
        continue;
      }
      while (!settled(iteration)) {
        if (deadline && Clock::now() > *deadline) {
          st.aborted = true;
          return;
        }
        std::this_thread::yield();
      }
      if (!all_converged())
        armed = false;
      else if (clean_sweeps.load(std::memory_order_acquire) > armed_at)
        return;
    }
  };
  run_team(team_size, worker_fn);

  RunReport report;
  report.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (observer) observer->on_run_end();
  bool aborted = false;
  for (const auto& st : workers) {
    report.iterations = std::max(report.iterations, st.iterations);
    report.vertex_updates += st.updates;
    report.crashed_workers += st.crashed ? 1 : 0;
    aborted = aborted || st.aborted;
  }
  if (flags.all_converged())
    report.status = RunStatus::kConverged;
  else
    report.status = aborted ? RunStatus::kAborted : RunStatus::kIterationLimit;
  report.ranks = std::move(ranks);
  fill_affected_stats(p, flags, report);
  return report;
}

}  // namespace dynrank::detail

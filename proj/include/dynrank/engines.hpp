#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dynrank/flags.hpp"
#include "dynrank/graph.hpp"
#include "dynrank/observer.hpp"

namespace dynrank {

using RankVector = std::vector<double>;

enum class EngineId : std::uint8_t {
  kStaticBB,
  kStaticLF,
  kNaiveDynamicBB,
  kNaiveDynamicLF,
  kTraversalBB,
  kTraversalLF,
  kFrontierBB,
  kFrontierLF,
};

/// Kebab-case ids: static-bb, static-lf, nd-bb, nd-lf, dt-bb, dt-lf, df-bb, df-lf.
std::string_view to_string(EngineId id) noexcept;
/// Throws std::invalid_argument listing the valid ids.
EngineId parse_engine_id(std::string_view text);
std::span<const EngineId> all_engines() noexcept;

bool is_lock_free(EngineId id) noexcept;
/// The static engine of the same synchronization family.
EngineId static_counterpart(EngineId id) noexcept;

enum class Schedule : std::uint8_t {
  kDynamic,  // shared claim counter
  kStatic,   // worker w takes chunks w, w+T, w+2T, ...; barrier engines only
};

struct PageRankConfig {
  double damping = 0.85;
  double iteration_tolerance = 1e-10;
  /// Defaults to iteration_tolerance / 1000. Infinity disables frontier growth.
  std::optional<double> frontier_tolerance;
  std::size_t max_iterations = 500;
  std::size_t chunk_size = 2048;
  unsigned num_threads = 1;
  Schedule schedule = Schedule::kDynamic;
  /// Lock-free engines: track convergence per vertex chunk instead of
  /// scanning every vertex flag.
  bool per_chunk_convergence = false;

  double effective_frontier_tolerance() const noexcept {
    return frontier_tolerance.value_or(iteration_tolerance / 1000.0);
  }

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

enum class RunStatus : std::uint8_t {
  kConverged,
  kIterationLimit,
  kAborted,  // watchdog expired, e.g. a barrier that can never be passed
};

std::string_view to_string(RunStatus status) noexcept;

struct RunReport {
  RankVector ranks;
  /// Barrier engines: iterations run. Lock-free engines: the most iterations
  /// any single worker entered.
  std::size_t iterations = 0;
  /// Wall time of the parallel region; excludes allocation.
  double seconds = 0.0;
  /// Vertices marked by the batch alone, and at the end of the run. Both are
  /// |V| for static and naive-dynamic engines.
  std::size_t affected_initial = 0;
  std::size_t affected_total = 0;
  /// Final affected flags for traversal and frontier engines, empty otherwise.
  std::vector<std::uint8_t> affected;
  /// Rank computations summed over workers.
  std::uint64_t vertex_updates = 0;
  unsigned crashed_workers = 0;
  RunStatus status = RunStatus::kIterationLimit;

  bool converged() const noexcept { return status == RunStatus::kConverged; }
};

struct RunOptions {
  WorkerObserver* observer = nullptr;
  /// Abort the run once this much wall time has passed.
  std::optional<std::chrono::nanoseconds> watchdog;
};

/// (1-α)/n + α Σ_{u ∈ in(v)} R[u] / |out(u)|, summed in in-adjacency order.
double rank_contribution(const Graph& graph, std::span<const double> ranks, VertexId v,
                         double damping);

/// max_v |a[v] - b[v]|. Throws std::invalid_argument on length mismatch.
double linf_norm(std::span<const double> a, std::span<const double> b);

/// Marks every vertex reachable from `start` in `graph` as affected, and as
/// not-converged when requested. Uses an explicit stack. Traversal does not
/// descend below vertices that were already affected.
void visit_dfs(FlagVectors& flags, const Graph& graph, VertexId start,
               bool mark_not_converged = false);

/// Marks (prev ∪ curr).out(u) for the source u of every batch edge as
/// affected (and not-converged when requested), then sets checked[u].
void mark_initial_affected(const Graph& prev, const Graph& curr, const BatchUpdate& batch,
                           FlagVectors& flags, bool mark_not_converged = false);

/// Marks everything reachable in curr from (prev ∪ curr).out(u) for every
/// batch source u.
void mark_traversal_affected(const Graph& prev, const Graph& curr, const BatchUpdate& batch,
                             FlagVectors& flags, bool mark_not_converged = false);

// Static PageRank from uniform 1/n ranks.
RunReport static_bb(const Graph& graph, const PageRankConfig& cfg, const RunOptions& opts = {});
RunReport static_lf(const Graph& graph, const PageRankConfig& cfg, const RunOptions& opts = {});

// Naive-dynamic: every vertex, warm-started from the previous ranks.
RunReport nd_bb(const Graph& curr, std::span<const double> prev_ranks,
                const PageRankConfig& cfg, const RunOptions& opts = {});
RunReport nd_lf(const Graph& curr, std::span<const double> prev_ranks,
                const PageRankConfig& cfg, const RunOptions& opts = {});

// Dynamic traversal: vertices reachable from the batch sources.
RunReport dt_bb(const Graph& prev, const Graph& curr, const BatchUpdate& batch,
                std::span<const double> prev_ranks, const PageRankConfig& cfg,
                const RunOptions& opts = {});
RunReport dt_lf(const Graph& prev, const Graph& curr, const BatchUpdate& batch,
                std::span<const double> prev_ranks, const PageRankConfig& cfg,
                const RunOptions& opts = {});

// Dynamic frontier: affected set grows where rank change exceeds the
// frontier tolerance.
RunReport df_bb(const Graph& prev, const Graph& curr, const BatchUpdate& batch,
                std::span<const double> prev_ranks, const PageRankConfig& cfg,
                const RunOptions& opts = {});
RunReport df_lf(const Graph& prev, const Graph& curr, const BatchUpdate& batch,
                std::span<const double> prev_ranks, const PageRankConfig& cfg,
                const RunOptions& opts = {});

/// Dispatches to the engine named by `id`. Static engines ignore prev, batch
/// and prev_ranks; naive-dynamic engines ignore prev and batch.
RunReport run_engine(EngineId id, const Graph& prev, const Graph& curr,
                     const BatchUpdate& batch, std::span<const double> prev_ranks,
                     const PageRankConfig& cfg, const RunOptions& opts = {});

}  // namespace dynrank

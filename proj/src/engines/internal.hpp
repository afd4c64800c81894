#pragma once

// Machinery shared by the barrier-based and lock-free engines.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "dynrank/engines.hpp"

namespace dynrank::detail {

enum class Variant : std::uint8_t { kStatic, kNaiveDynamic, kTraversal, kFrontier };

struct Problem {
  Variant variant;
  const Graph* prev;          // traversal and frontier only
  const Graph& curr;
  const BatchUpdate* batch;   // traversal and frontier only
  std::span<const double> initial;  // empty: uniform 1/n
};

constexpr bool needs_marking(Variant v) noexcept {
  return v == Variant::kTraversal || v == Variant::kFrontier;
}

using Clock = std::chrono::steady_clock;

inline double load_rank(const double& r) noexcept {
  return std::atomic_ref<double>(const_cast<double&>(r)).load(std::memory_order_relaxed);
}
/// Stores `value` and returns the rank it replaced. Successive exchanges on
/// one entry synchronize, so whatever a writer did before its exchange is
/// visible to the next writer.
inline double exchange_rank(double& r, double value) noexcept {
  return std::atomic_ref<double>(r).exchange(value, std::memory_order_acq_rel);
}

/// Rank of v from the in-neighbor ranks returned by `rank_of`.
template <class RankOf>
inline double compute_rank(const Graph& g, VertexId v, double base, double damping,
                           RankOf&& rank_of) noexcept {
  double r = base;
  for (VertexId u : g.in_neighbors(v))
    r += damping * rank_of(u) / static_cast<double>(g.out_degree(u));
  return r;
}

/// Calls fn(v) for each v in prev.out(u) ∪ curr.out(u), in increasing order.
template <class Fn>
inline void for_each_union_out(const Graph& prev, const Graph& curr, VertexId u, Fn&& fn) {
  auto a = prev.out_neighbors(u);
  auto b = curr.out_neighbors(u);
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i] < b[j])) {
      fn(a[i++]);
    } else if (i == a.size() || b[j] < a[i]) {
      fn(b[j++]);
    } else {
      fn(a[i]);
      ++i, ++j;
    }
  }
}

/// Iterative DFS over `g` from `start`, marking affected vertices and calling
/// on_mark(v) for each newly marked one. Does not descend below vertices that
/// were already affected. `stack` is caller-owned scratch space.
template <class OnMark>
void dfs_mark(FlagVectors& flags, const Graph& g, VertexId start, std::vector<VertexId>& stack,
              OnMark&& on_mark) {
  if (flags.affected(start)) return;
  flags.mark_affected(start);
  on_mark(start);
  stack.clear();
  stack.push_back(start);
  while (!stack.empty()) {
    const VertexId u = stack.back();
    stack.pop_back();
    for (VertexId v : g.out_neighbors(u)) {
      if (flags.affected(v)) continue;
      flags.mark_affected(v);
      on_mark(v);
      stack.push_back(v);
    }
  }
}

/// Batch edges in processing order: deletions, then insertions.
inline std::vector<Edge> batch_edges(const BatchUpdate* batch) {
  std::vector<Edge> edges;
  if (!batch) return edges;
  edges.reserve(batch->size());
  edges.insert(edges.end(), batch->deletions.begin(), batch->deletions.end());
  edges.insert(edges.end(), batch->insertions.begin(), batch->insertions.end());
  return edges;
}

/// Full-team rendezvous that can be abandoned. A worker that stops arriving
/// (crash-stop) leaves the rest waiting until the optional deadline, after
/// which every waiter is released with `false`.
class TeamBarrier {
 public:
  TeamBarrier(unsigned parties, std::optional<Clock::time_point> deadline)
      : parties_(parties), deadline_(deadline) {}

  /// The last arriving worker runs `completion` before anyone is released.
  template <class Completion>
  bool arrive_and_wait(Completion&& completion) {
    std::unique_lock lock(mutex_);
    if (cancelled_) return false;
    const std::size_t generation = generation_;
    if (++arrived_ == parties_) {
      completion();
      arrived_ = 0;
      ++generation_;
      released_.notify_all();
      return true;
    }
    auto passed = [&] { return generation_ != generation || cancelled_; };
    if (deadline_) {
      if (!released_.wait_until(lock, *deadline_, passed)) {
        cancelled_ = true;
        released_.notify_all();
      }
    } else {
      released_.wait(lock, passed);
    }
    return generation_ != generation;
  }

 private:
  std::mutex mutex_;
  std::condition_variable released_;
  const unsigned parties_;
  const std::optional<Clock::time_point> deadline_;
  unsigned arrived_ = 0;
  std::size_t generation_ = 0;
  bool cancelled_ = false;
};

/// Runs fn(worker) on `count` threads and joins them.
template <class Fn>
void run_team(unsigned count, Fn&& fn) {
  std::vector<std::jthread> team;
  team.reserve(count);
  for (unsigned w = 0; w < count; ++w) team.emplace_back([&fn, w] { fn(w); });
}

inline std::optional<Clock::time_point> deadline_from(const RunOptions& opts,
                                                      Clock::time_point start) {
  if (!opts.watchdog) return std::nullopt;
  return start + std::chrono::duration_cast<Clock::duration>(*opts.watchdog);
}

inline std::vector<double> initial_ranks(const Problem& p) {
  const std::size_t n = p.curr.num_vertices();
  if (p.initial.empty()) return std::vector<double>(n, n ? 1.0 / static_cast<double>(n) : 0.0);
  return {p.initial.begin(), p.initial.end()};
}

/// affected_initial and the final affected flags, computed outside the timed
/// region from the same marking rules the workers apply.
void fill_affected_stats(const Problem& p, const FlagVectors& final_flags, RunReport& report);

RunReport run_barrier_based(const Problem& p, const PageRankConfig& cfg, const RunOptions& opts);
RunReport run_lock_free(const Problem& p, const PageRankConfig& cfg, const RunOptions& opts);

}  // namespace dynrank::detail
